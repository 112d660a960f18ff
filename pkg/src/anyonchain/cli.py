"""Command-line front end.

Exit status: 0 all checks pass, 1 a check failed, 2 usage or configuration
error, 3 capacity or convergence error.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import pi
from pathlib import Path

from anyonchain import __version__, theory, verify
from anyonchain.basis import CapacityError, ChainGeometry, SectorKey
from anyonchain.eigensolver import ConvergenceError, sector_spectrum
from anyonchain.hamiltonian import DEFAULT_DENSE_LIMIT, OperatorHandle
from anyonchain.report import (
    VerificationReport,
    atomic_write,
    build_document,
    checks_csv,
    dumps,
    spectrum_csv,
)
from anyonchain.states import Species, pair_sector, sector_for

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


class UsageError(ValueError):
    pass


# -- argument parsing ----------------------------------------------------------


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return value


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a fraction like 1/2, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=1e-9, help="residual tolerance (default 1e-9)")
    common.add_argument(
        "--dense-limit", type=_positive_int, default=DEFAULT_DENSE_LIMIT, help="largest sector for dense algebra"
    )
    common.add_argument("--threads", type=_positive_int, default=1, help="worker threads for independent checks")
    common.add_argument("--out", type=Path, default=None, help="directory for report files (none written if omitted)")
    common.add_argument("--format", choices=["json", "csv"], default="json", help="csv also writes a CSV table")
    common.add_argument("--seed", type=int, default=42, help="seed for random-vector checks")

    parser = argparse.ArgumentParser(prog="anyonchain", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="exact sector spectrum with momenta")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--species", choices=["spinon", "holon", "ground"], default="spinon")
    p.add_argument("--holes", type=int, default=None, help="override the sector hole number")
    p.add_argument("--nup", type=int, default=None, help="override the sector up-spin number")
    p.add_argument("--mode", choices=["dense", "iterative"], default="dense")
    p.add_argument("--k", type=_positive_int, default=6, help="levels for --mode iterative")

    p = sub.add_parser("verify", parents=[common], help="eigenstate and scattering identities")
    p.add_argument("target", choices=["ground", "spinon", "holon"])
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--vanishing", action="store_true", help="also check spinon labels outside 0..M")

    p = sub.add_parser("fit-shift", parents=[common], help="fit the statistical shift to exact levels")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--species", choices=["spinon", "holon"], default="spinon")

    p = sub.add_parser("spacing", parents=[common], help="fractional momentum spacing and translation phases")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--species", choices=["spinon", "holon"], default="spinon")
    p.add_argument("--no-translation", action="store_true", help="skip the state-based translation check")

    p = sub.add_parser("count", parents=[common], help="many-spinon state counting")
    p.add_argument("--n", type=_positive_int, required=True)

    p = sub.add_parser("gram", parents=[common], help="Gram structure of localised spinons and holons")
    p.add_argument("--n", type=_positive_int, required=True)

    p = sub.add_parser("quantize", parents=[common], help="allowed momentum spacings or angular momenta")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--theta", type=float, help="statistical parameter in radians, in (-pi, pi]")
    group.add_argument("--theta-over-pi", type=_fraction, help="theta/pi as an exact fraction, e.g. 1/2")
    p.add_argument("--length", type=_positive_float, default=2 * pi, help="system length L (1D rule)")
    p.add_argument("--k", type=_positive_int, default=3)
    p.add_argument("--kind", choices=["1d", "2d"], default="1d")

    p = sub.add_parser("suite", parents=[common], help="run every verification check")
    p.add_argument("--quick", action="store_true", help="smallest sizes only")
    return parser


# -- commands ------------------------------------------------------------------


def _species_n(args):
    if args.n % 2:
        raise UsageError(f"--n must be even for two-particle states, got {args.n}")


def cmd_spectrum(args):
    geometry = ChainGeometry(args.n)
    op = OperatorHandle(geometry, args.dense_limit)
    if args.species == "ground":
        key = SectorKey(0, args.n // 2)
    elif args.n % 2 == 0:
        key = pair_sector(geometry, args.species).key
    else:
        key = SectorKey(0 if args.species == "spinon" else 1, (args.n - 1) // 2)
    key = SectorKey(
        key.n_holes if args.holes is None else args.holes,
        key.n_up if args.nup is None else args.nup,
    )
    try:
        key.validate(args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sector = sector_for(geometry, key)
    if args.mode == "iterative" and args.k >= sector.size:
        raise UsageError(f"--k must be smaller than the sector size {sector.size}")
    result = sector_spectrum(op, sector, args.mode, args.k, momenta=True, seed=args.seed)
    report = VerificationReport({"N": args.n, "n_holes": key.n_holes, "n_up": key.n_up, "size": sector.size})
    worst = float(result.residuals.max())
    report.add(
        f"eigen_residual_N{args.n}_Q{key.n_holes}_up{key.n_up}",
        worst <= result.tolerance,
        worst,
        result.tolerance,
        mode=args.mode,
        levels=len(result),
        lowest=float(result.eigenvalues[0]),
    )
    rows = [
        (key.n_holes, key.n_up, i, float(e), float(k))
        for i, (e, k) in enumerate(zip(result.eigenvalues, result.momenta))
    ]
    lines = [f"sector N={args.n} Q={key.n_holes} Mup={key.n_up} size={sector.size}"]
    for _, _, i, e, k in rows[:10]:
        lines.append(f"  E[{i}] = {e:+.12f}   K*N/2pi = {k * args.n / (2 * pi):+.0f}")
    if len(rows) > 10:
        lines.append(f"  ... {len(rows) - 10} more levels")
    return [report], lines, spectrum_csv(rows)


def cmd_verify(args):
    if args.target == "ground":
        _species_n(args)
        return [verify.verify_ground_state(args.n, tol=min(args.tol, 1e-10), dense_limit=args.dense_limit)], [], None
    _species_n(args)
    return [verify.verify_pair_identities(args.n, args.target, args.tol, vanishing=args.vanishing)], [], None


def cmd_fit_shift(args):
    _species_n(args)
    s, report = verify.fit_statistical_shift(args.n, args.species, dense_limit=args.dense_limit)
    return [report], [f"fitted statistical shift s = {s:.9f}"], None


def cmd_spacing(args):
    _species_n(args)
    return [verify.verify_momentum_spacing(args.n, args.species, translation=not args.no_translation)], [], None


def cmd_count(args):
    report = verify.verify_state_counting(args.n)
    counting = theory.hilbert_dimension(args.n)
    lines = [str(counting.total)]
    lines += [f"  N_sp={k}: {v} states in {counting.orbitals[k]} orbitals" for k, v in counting.counts.items()]
    return [report], lines, None


def cmd_gram(args):
    if args.n % 2 == 0 or args.n < 3:
        raise UsageError(f"--n must be odd and >= 3, got {args.n}")
    return [verify.verify_gram_structure(args.n)], [], None


def cmd_quantize(args):
    try:
        if args.theta_over_pi is not None:
            rule = theory.QuantizationRule(args.theta_over_pi, theory.RuleKind(args.kind), args.length)
        else:
            rule = theory.QuantizationRule.from_theta(args.theta, theory.RuleKind(args.kind), args.length)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    values = rule.first_allowed(args.k)
    report = VerificationReport({"theta_over_pi": rule.theta_over_pi, "kind": args.kind, "length": args.length})
    details = {"values": [float(v) for v in values], "exact": [str(v) for v in values]}
    if rule.kind is theory.RuleKind.MOMENTUM_SPACING_1D:
        details["spacings"] = rule.first_spacings(args.k)
        label = "dp*L/2pi"
    else:
        label = "l_z/hbar"
    report.add("allowed_values", True, len(values), None, **details)
    shown = ", ".join(f"{float(v):.6g}" for v in values)
    return [report], [f"allowed {label}: {{{shown}}}"], None


def suite_tasks(quick: bool, args) -> list:
    """(name, callable) pairs, one per verification group."""
    dl = args.dense_limit
    tol = args.tol
    tasks = []
    for n in ([2, 4, 6] if quick else [2, 4, 6, 8, 10, 12]):
        tasks.append((f"ground N={n}", lambda n=n: verify.verify_ground_state(n, dense_limit=dl)))
    for n in ([6, 8] if quick else [6, 8, 10, 12]):
        tasks.append(
            (f"spinon identities N={n}", lambda n=n: verify.verify_pair_identities(n, "spinon", tol, vanishing=n <= 8))
        )
    for n in ([6] if quick else [6, 8, 10]):
        tasks.append((f"holon identities N={n}", lambda n=n: verify.verify_pair_identities(n, "holon", tol)))
        tasks.append((f"spinon spectrum N={n}", lambda n=n: verify.match_spectrum(n, "spinon", tol, dense_limit=dl)))
        tasks.append((f"holon spectrum N={n}", lambda n=n: verify.match_spectrum(n, "holon", 1e-8, dense_limit=dl)))
    fits = [(8, "spinon"), (8, "holon")] if quick else [(8, "spinon"), (10, "spinon"), (12, "spinon"), (8, "holon"), (10, "holon")]
    for n, sp in fits:
        tasks.append((f"{sp} shift N={n}", lambda n=n, sp=sp: verify.fit_statistical_shift(n, sp, dense_limit=dl)[1]))
    for n in range(2, (10 if quick else 16) + 1, 2):
        for sp in ("spinon", "holon"):
            tasks.append((f"{sp} spacing N={n}", lambda n=n, sp=sp: verify.verify_momentum_spacing(n, sp)))
    for n in range(1, (12 if quick else 24) + 1):
        tasks.append((f"count N={n}", lambda n=n: verify.verify_state_counting(n)))
    for n in ([3, 5] if quick else [3, 5, 7, 9]):
        tasks.append((f"gram N={n}", lambda n=n: verify.verify_gram_structure(n)))
    for n in range(2, (6 if quick else 10) + 1, 2):
        tasks.append((f"operator N={n}", lambda n=n: verify.verify_operator(n, seed=args.seed)))
    tasks.append(("dispersion", lambda: verify.verify_dispersion(n_max=16 if quick else 32)))
    return tasks


def cmd_suite(args):
    tasks = suite_tasks(args.quick, args)
    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        futures = [pool.submit(fn) for _, fn in tasks]
        reports = [f.result() for f in futures]
    lines = [
        f"{'PASS' if r.passed else 'FAIL'}  {name:<26} ({len(r.checks)} checks, {r.elapsed_seconds:.2f}s)"
        for (name, _), r in zip(tasks, reports)
    ]
    return reports, lines, None


COMMANDS = {
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "fit-shift": cmd_fit_shift,
    "spacing": cmd_spacing,
    "count": cmd_count,
    "gram": cmd_gram,
    "quantize": cmd_quantize,
    "suite": cmd_suite,
}


def _config(args) -> dict:
    config = {k: v for k, v in vars(args).items() if k != "out"}
    if isinstance(config.get("theta_over_pi"), Fraction):
        config["theta_over_pi"] = str(config["theta_over_pi"])
    return config


def _file_stem(args) -> str:
    return f"verify-{args.target}" if args.command == "verify" else args.command


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        reports, lines, table = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    elapsed = time.perf_counter() - start

    document = build_document(__version__, _file_stem(args), _config(args), reports, elapsed)
    for line in lines:
        print(line)
    n_fail = 0
    for check in document["checks"]:
        if not check["pass"]:
            n_fail += 1
            print(f"FAIL {check['name']}: value={check['value']} tolerance={check['tolerance']}", file=sys.stderr)
    status = "PASS" if document["pass"] else "FAIL"
    print(f"{status}: {len(document['checks']) - n_fail}/{len(document['checks'])} checks passed in {elapsed:.2f}s")

    if args.out is not None:
        stem = _file_stem(args)
        atomic_write(args.out / f"{stem}.json", dumps(document))
        if args.format == "csv":
            atomic_write(args.out / f"{stem}.csv", table if table is not None else checks_csv(document))
    return EXIT_OK if document["pass"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
