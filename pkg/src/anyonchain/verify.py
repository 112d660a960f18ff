"""Numerical checks of the closed-form spinon/holon results against exact
diagonalisation.  Every public function returns a VerificationReport; the
residuals are relative to ||H|| * ||Psi|| with ||H|| the max-row-sum bound.
"""

from __future__ import annotations

import time
from fractions import Fraction
from math import pi

import numpy as np
import scipy.optimize

from anyonchain import theory
from anyonchain.basis import (
    ChainGeometry,
    SectorKey,
    StateVector,
    apply_translation,
)
from anyonchain.eigensolver import sector_spectrum
from anyonchain.hamiltonian import (
    DEFAULT_DENSE_LIMIT,
    OperatorHandle,
    apply_hamiltonian,
    apply_to_array,
    norm_estimate,
    operator_self_checks,
)
from anyonchain.report import VerificationReport
from anyonchain.states import (
    PairLabel,
    Species,
    amplitude_bound,
    gram_matrix,
    ground_state,
    localized_state,
    pair_sector,
    pair_state,
    sector_for,
    two_spinon_state,
    valid_labels,
    vanishes,
)

HALF_FERMION = Fraction(1, 2)


class _Timer:
    def __init__(self, report):
        self.report = report

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.elapsed_seconds = time.perf_counter() - self.t0


def _geometry(n) -> ChainGeometry:
    return n if isinstance(n, ChainGeometry) else ChainGeometry(int(n))


# -- ground state --------------------------------------------------------------


def verify_ground_state(
    geometry, tol: float = 1e-10, dense_check: bool = True, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> VerificationReport:
    geometry = _geometry(geometry)
    n = geometry.n_sites
    report = VerificationReport({"N": n, "n_holes": 0, "n_up": n // 2, "species": "ground"})
    with _Timer(report):
        op = OperatorHandle(geometry, dense_limit)
        psi = ground_state(geometry)
        h_norm = norm_estimate(op, psi.sector)
        e0 = theory.ground_energy(n)
        h_psi = apply_hamiltonian(op, psi)
        residual = (h_psi - psi * e0).norm / (h_norm * psi.norm)
        measured = psi.vdot(h_psi).real / psi.norm**2
        rel = abs(measured - e0) / abs(e0)
        report.add(f"ground_residual_N{n}", residual <= tol, residual, tol, E0=e0)
        report.add(f"ground_energy_N{n}", rel <= tol, rel, tol, measured=measured, predicted=e0)
        if dense_check and psi.sector.size <= op.dense_limit:
            lowest = float(sector_spectrum(op, psi.sector).eigenvalues[0])
            gap = abs(lowest - e0) / abs(e0)
            report.add(f"ground_is_lowest_N{n}", gap <= tol, gap, tol, lowest=lowest)
    return report


# -- scattering identities -----------------------------------------------------


def basis_weight(label: PairLabel) -> int:
    """Multiplicity with which the symmetrised pair function counts a label.

    phi_kk = 2 (h1 - h2) h1^k h2^k carries an extra factor 2 relative to the
    two distinct monomials of phi_mn, m != n, so a scattering term landing on
    (k, k) enters with half its coefficient when written in these states.
    """
    return 2 if label.species is Species.HOLON and label.m == label.n else 1


def scattering_residual(op: OperatorHandle, label: PairLabel) -> tuple[float, StateVector]:
    psi = pair_state(label)
    r = apply_hamiltonian(op, psi) - psi * theory.pair_energy(label)
    for term in theory.scattering_terms(label):
        r = r - pair_state(term.target) * (term.coefficient / basis_weight(term.target))
    h_norm = norm_estimate(op, psi.sector)
    return r.norm / (h_norm * psi.norm), psi


def verify_scattering_identity(geometry, label: PairLabel, tol: float = 1e-9) -> VerificationReport:
    """H Psi_mn = E_mn Psi_mn + sum_l V_l Psi_target(l), or the vanishing claim
    for spinon labels outside 0..M."""
    geometry = _geometry(geometry)
    report = VerificationReport(
        {"N": geometry.n_sites, "species": label.species.value, "label": [label.m, label.n]}
    )
    with _Timer(report):
        op = OperatorHandle(geometry)
        if label.species is Species.SPINON and not label.valid:
            _add_vanishing(report, geometry, label)
            return report
        label.require_valid()
        res, _ = scattering_residual(op, label)
        terms = theory.scattering_terms(label)
        report.add(
            f"scattering_{label.species.value}_N{geometry.n_sites}_m{label.m}_n{label.n}",
            res <= tol,
            res,
            tol,
            n_terms=len(terms),
            exact_eigenstate=not terms,
            energy=theory.pair_energy(label),
        )
    return report


def _add_vanishing(report, geometry, label):
    psi = two_spinon_state(geometry, label.m, label.n)
    bound = amplitude_bound(PairLabel(Species.SPINON, 0, 0, geometry.n_sites))
    ratio = psi.norm / bound
    report.add(
        f"vanishing_spinon_N{geometry.n_sites}_m{label.m}_n{label.n}",
        vanishes(psi, bound),
        ratio,
        1e-10,
        norm=psi.norm,
        bound=bound,
    )


def out_of_range_spinon_labels(n_sites: int) -> list[PairLabel]:
    """Labels (m, n) in 0..N-1 with m > M or n > M."""
    M = (n_sites - 2) // 2
    return [
        PairLabel(Species.SPINON, m, n, n_sites)
        for m in range(n_sites)
        for n in range(n_sites)
        if m > M or n > M
    ]


def verify_pair_identities(geometry, species, tol: float = 1e-9, vanishing: bool = False) -> VerificationReport:
    """Scattering identity for every valid label (plus the vanishing labels on request)."""
    geometry = _geometry(geometry)
    species = Species.parse(species)
    report = VerificationReport({"N": geometry.n_sites, "species": species.value})
    with _Timer(report):
        labels = valid_labels(species, geometry.n_sites)
        if vanishing and species is Species.SPINON:
            labels = labels + out_of_range_spinon_labels(geometry.n_sites)
        for label in labels:
            report.extend(verify_scattering_identity(geometry, label, tol))
    return report


# -- spectrum matching ---------------------------------------------------------


def greedy_match(predicted, exact) -> tuple[np.ndarray, np.ndarray]:
    """Pair each predicted value (ascending) with the nearest unused exact value.

    Returns (order of predicted values, index into ``exact`` for each).
    """
    predicted = np.asarray(predicted, dtype=float)
    exact = np.asarray(exact, dtype=float)
    if len(predicted) > len(exact):
        raise ValueError("more predicted levels than exact eigenvalues")
    order = np.argsort(predicted, kind="stable")
    used = np.zeros(len(exact), dtype=bool)
    chosen = np.empty(len(predicted), dtype=int)
    for slot, i in enumerate(order):
        dist = np.abs(exact - predicted[i])
        dist[used] = np.inf
        j = int(np.argmin(dist))
        used[j] = True
        chosen[slot] = j
    return order, chosen


def match_spectrum(
    geometry, species, tol: float = 1e-9, s=theory.DEFAULT_SHIFT, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> VerificationReport:
    """Every predicted pair energy must appear in the exact sector spectrum.

    Degenerate predictions are matched to distinct eigenvalues.  A common
    offset c of all matches (std below 1e-10 but |c| above tolerance) is
    reported as a convention offset and fails.
    """
    geometry = _geometry(geometry)
    species = Species.parse(species)
    n = geometry.n_sites
    sector = pair_sector(geometry, species)
    report = VerificationReport(
        {"N": n, "species": species.value, "n_holes": sector.key.n_holes, "n_up": sector.key.n_up}
    )
    with _Timer(report):
        op = OperatorHandle(geometry, dense_limit)
        spectrum = sector_spectrum(op, sector)
        labels = valid_labels(species, n)
        predicted = np.array([theory.pair_energy(lab, s) for lab in labels])
        order, chosen = greedy_match(predicted, spectrum.eigenvalues)
        offsets = spectrum.eigenvalues[chosen] - predicted[order]
        scaled_tol = tol * spectrum.norm_H
        worst = float(np.max(np.abs(offsets)))
        prefix = f"{species.value}_N{n}"
        report.add(
            f"spectrum_inclusion_{prefix}",
            worst <= scaled_tol,
            worst,
            scaled_tol,
            matched=int(np.sum(np.abs(offsets) <= scaled_tol)),
            labels=len(labels),
            norm_H=spectrum.norm_H,
            predicted=predicted[order],
            exact=spectrum.eigenvalues[chosen],
        )
        mean = float(np.mean(offsets))
        std = float(np.std(offsets))
        is_offset = std < 1e-10 and abs(mean) > scaled_tol
        report.add(
            f"constant_offset_{prefix}",
            not is_offset,
            mean,
            scaled_tol,
            std=std,
            convention_offset=mean if is_offset else None,
        )
    return report


# -- statistical shift ---------------------------------------------------------


def _blocks(labels):
    blocks = {}
    for lab in labels:
        blocks.setdefault(lab.m + lab.n, []).append(lab)
    return blocks


def explicit_block_levels(geometry, species) -> tuple[dict, float, list[float]]:
    """Exact eigenvalues of H restricted to span{Psi_mn : m + n = const}.

    The span is invariant under H, so its eigenvalues are exact levels carried
    by the explicit states, obtained without reference to any energy formula.

    Returns (block total -> (labels, sorted levels), worst invariance defect,
    worst rank deficit).
    """
    geometry = _geometry(geometry)
    op = OperatorHandle(geometry)
    sector = pair_sector(geometry, species)
    h_norm = norm_estimate(op, sector)
    out = {}
    defect = 0.0
    rank_deficit = 0
    for total, labels in sorted(_blocks(valid_labels(species, geometry.n_sites)).items()):
        cols = np.array([pair_state(lab).normalized().amplitudes for lab in labels]).T
        u, sv, _ = np.linalg.svd(cols, full_matrices=False)
        rank = int(np.sum(sv > 1e-10 * sv[0]))
        rank_deficit = max(rank_deficit, len(labels) - rank)
        q = u[:, :rank]
        hq = apply_to_array(op, sector, q)
        h_block = q.conj().T @ hq
        h_block = 0.5 * (h_block + h_block.conj().T)
        defect = max(defect, float(np.linalg.norm(hq - q @ h_block, 2) / h_norm))
        out[total] = (labels, np.linalg.eigvalsh(h_block))
    return out, defect, rank_deficit


def shift_objective(blocks: dict, s) -> float:
    """RMS difference between exact block levels and predicted energies at shift s,
    pairing both sorted within each block."""
    sq, count = 0.0, 0
    for labels, levels in blocks.values():
        pred = np.sort([theory.pair_energy(lab, s) for lab in labels])
        k = min(len(pred), len(levels))
        sq += float(np.sum((np.sort(levels)[:k] - pred[:k]) ** 2))
        count += k
    return (sq / count) ** 0.5


def fit_shift(blocks: dict, grid_step: float = 1e-4) -> dict:
    """Minimise ``shift_objective`` over s in [0, 1/2].

    A scan on a regular grid locates the basin and tests unimodality; a bounded
    scalar minimisation then refines the minimum.
    """
    grid = np.linspace(0.0, 0.5, int(round(0.5 / grid_step)) + 1)
    values = np.array([shift_objective(blocks, s) for s in grid])
    i = int(np.argmin(values))
    d = np.diff(values)
    unimodal = bool(np.all(d[:i] <= 0) and np.all(d[i:] >= 0))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    # minimise the mean square: smooth at the optimum, unlike the RMS
    res = scipy.optimize.minimize_scalar(
        lambda s: shift_objective(blocks, s) ** 2,
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    s_fit = float(res.x)
    return {
        "s": s_fit,
        "residual": float(res.fun) ** 0.5,
        "residual_at_0": shift_objective(blocks, 0.0),
        "residual_at_quarter": shift_objective(blocks, 0.25),
        "unimodal": unimodal,
    }


def fit_statistical_shift(
    geometry, species, tol_s: float = 1e-6, min_ratio: float = 1e3, dense_limit: int = DEFAULT_DENSE_LIMIT
):
    """Fit s to the exact two-particle levels.  Returns (s, report)."""
    geometry = _geometry(geometry)
    species = Species.parse(species)
    n = geometry.n_sites
    report = VerificationReport({"N": n, "species": species.value})
    with _Timer(report):
        blocks, defect, deficit = explicit_block_levels(geometry, species)
        # the block levels must be genuine eigenvalues of the full sector
        op = OperatorHandle(geometry, dense_limit)
        sector = pair_sector(geometry, species)
        spectrum = sector_spectrum(op, sector).eigenvalues
        levels = np.concatenate([lv for _, lv in blocks.values()])
        _, chosen = greedy_match(levels, spectrum)
        in_spectrum = float(np.max(np.abs(np.sort(levels) - spectrum[chosen])))
        fit = fit_shift(blocks)
        prefix = f"{species.value}_N{n}"
        h_norm = norm_estimate(op, sector)
        report.add(f"block_invariance_{prefix}", defect <= 1e-10, defect, 1e-10, rank_deficit=deficit)
        report.add(
            f"block_levels_in_spectrum_{prefix}",
            in_spectrum <= 1e-9 * h_norm and deficit == 0,
            in_spectrum,
            1e-9 * h_norm,
        )
        err = abs(fit["s"] - 0.25)
        report.add(f"fitted_shift_{prefix}", err <= tol_s, fit["s"], tol_s, deviation=err, residual=fit["residual"])
        floor = max(fit["residual_at_quarter"], np.finfo(float).tiny)
        ratio = fit["residual_at_0"] / floor
        report.add(
            f"shift_discrimination_{prefix}",
            ratio >= min_ratio,
            min(ratio, 1e300),
            min_ratio,
            residual_at_0=fit["residual_at_0"],
            residual_at_quarter=fit["residual_at_quarter"],
        )
        report.add(f"shift_unimodal_{prefix}", fit["unimodal"], None, None)
    return fit["s"], report


# -- momentum spacing ----------------------------------------------------------


def translation_phase(psi: StateVector) -> tuple[float, float]:
    """(K, deviation) with T psi = exp(-iK) psi; deviation = ||T psi - lambda psi|| / ||psi||."""
    t_psi = apply_translation(psi)
    lam = psi.vdot(t_psi) / psi.norm**2
    dev = (t_psi - psi * lam).norm / psi.norm
    return float(-np.angle(lam)), dev


def _wrap(x):
    return (x + pi) % (2 * pi) - pi


def verify_momentum_spacing(geometry, species, translation: bool = True, tol: float = 1e-10) -> VerificationReport:
    """Half-odd-integer momentum spacing for every label, exact in rationals,
    and translation eigenvalues that track the summed quasiparticle momenta."""
    geometry = _geometry(geometry)
    species = Species.parse(species)
    n = geometry.n_sites
    report = VerificationReport({"N": n, "species": species.value})
    with _Timer(report):
        rule = theory.QuantizationRule(HALF_FERMION)
        labels = valid_labels(species, n)
        bad = []
        for lab in labels:
            spacing = theory.spacing_quanta(lab)
            if not rule.allows(spacing):
                bad.append((lab.m, lab.n, str(spacing)))
        report.add(
            f"spacing_rule_{species.value}_N{n}",
            not bad,
            len(bad),
            0,
            labels=len(labels),
            violations=bad,
            theta_over_pi=str(HALF_FERMION),
        )
        if translation:
            worst_dev, worst_k = 0.0, 0.0
            ref = None
            skipped = []
            states = [pair_state(lab) for lab in labels]
            largest = max(psi.norm for psi in states)
            for lab, psi in zip(labels, states):
                if psi.norm <= 1e-10 * largest:
                    # tiny chains: some labels give the zero vector
                    skipped.append((lab.m, lab.n))
                    continue
                k, dev = translation_phase(psi)
                worst_dev = max(worst_dev, dev)
                total = theory.single_particle_momenta(lab).total
                c = k - total
                ref = c if ref is None else ref
                worst_k = max(worst_k, abs(_wrap(c - ref)))
            report.add(
                f"translation_eigenstate_{species.value}_N{n}",
                worst_dev <= tol,
                worst_dev,
                tol,
                skipped_zero_states=skipped,
            )
            report.add(
                f"translation_momentum_{species.value}_N{n}",
                worst_k <= tol,
                worst_k,
                tol,
                reference_offset=_wrap(ref),
            )
    return report


# -- counting and Gram structure -----------------------------------------------


def verify_state_counting(n_sites: int) -> VerificationReport:
    report = VerificationReport({"N": n_sites})
    with _Timer(report):
        counting = theory.hilbert_dimension(n_sites)
        report.add(
            f"hilbert_total_N{n_sites}",
            counting.total == 2**n_sites,
            counting.total,
            0,
            expected=2**n_sites,
            counts=counting.counts,
        )
        keys = sorted(counting.orbitals)
        steps = [counting.orbitals[a] - counting.orbitals[b] for a, b in zip(keys, keys[1:])]
        report.add(
            f"exclusion_decrement_N{n_sites}",
            all(d == 1 for d in steps),
            min(steps) if steps else 1,
            0,
            orbitals=counting.orbitals,
        )
    return report


def verify_gram_structure(n_sites: int, threshold: float = 1e-8) -> VerificationReport:
    if n_sites % 2 == 0 or n_sites < 3:
        raise ValueError(f"Gram structure needs odd N >= 3, got {n_sites}")
    geometry = ChainGeometry(n_sites)
    report = VerificationReport({"N": n_sites})
    with _Timer(report):
        M = (n_sites - 1) // 2
        sites = range(1, n_sites + 1)
        g_sp = gram_matrix([localized_state(geometry, Species.SPINON, a) for a in sites])
        sv = np.linalg.svd(g_sp, compute_uv=False)
        rank = int(np.sum(sv > threshold * sv[0]))
        report.add(
            f"spinon_gram_rank_N{n_sites}",
            rank == M + 1 and rank < n_sites,
            rank,
            threshold,
            expected=M + 1,
            singular_values=sv,
        )
        g_ho = gram_matrix([localized_state(geometry, Species.HOLON, a) for a in sites])
        off = g_ho - np.diag(np.diag(g_ho))
        worst = float(np.max(np.abs(off)))
        nonzero_diag = bool(np.all(np.diag(g_ho).real > 0))
        report.add(f"holon_gram_diagonal_N{n_sites}", worst == 0.0 and nonzero_diag, worst, 0.0)
    return report


# -- dispersion ----------------------------------------------------------------


def verify_dispersion(n_sites: int = 16, n_max: int = 32, points: int = 1000, h: float = 1e-5, tol: float = 1e-8) -> VerificationReport:
    """Analytic velocity vs finite differences, strict velocity monotonicity and
    the one-way crossing order v(k_m) > v(k_n) for all labels with N <= n_max."""
    report = VerificationReport({"N": n_sites, "n_max": n_max})
    with _Timer(report):
        for species in Species:
            lo, hi = theory.momentum_domain(species, n_sites)
            grid = np.linspace(lo, hi, points + 2)[1:-1]
            fd_err = 0.0
            velocity = []
            for k in grid:
                p = theory.dispersion(species, k, n_sites)
                plus = theory.dispersion(species, k + h, n_sites).energy
                minus = theory.dispersion(species, k - h, n_sites).energy
                fd_err = max(fd_err, abs((plus - minus) / (2 * h) - p.velocity))
                velocity.append(p.velocity)
            report.add(f"velocity_finite_difference_{species.value}", fd_err <= tol, fd_err, tol)
            dv = np.diff(velocity)
            monotone = bool(np.all(dv < 0)) if species is Species.SPINON else bool(np.all(dv > 0))
            report.add(
                f"velocity_monotone_{species.value}",
                monotone,
                float(np.max(dv) if species is Species.SPINON else np.min(dv)),
                0.0,
                direction="decreasing" if species is Species.SPINON else "increasing",
            )
            violations = []
            range_violations = []
            for n in range(2, n_max + 1, 2):
                for lab in valid_labels(species, n):
                    km = theory.single_particle_momenta(lab)
                    vm = theory.dispersion(species, km.first, n).velocity
                    vn = theory.dispersion(species, km.second, n).velocity
                    if not vm > vn:
                        violations.append((n, lab.m, lab.n))
                    if species is Species.SPINON:
                        ok = 0 < km.first < km.second < pi
                    else:
                        a, b = theory.momentum_quanta(lab)
                        # exact: -N/2 - 1/4 <= p_n < p_m <= 1/4 in units of 2 pi/N
                        ok = -Fraction(n, 2) - Fraction(1, 4) <= b < a <= Fraction(1, 4)
                    if not ok:
                        range_violations.append((n, lab.m, lab.n))
            report.add(
                f"crossing_order_{species.value}",
                not violations,
                len(violations),
                0,
                violations=violations,
            )
            report.add(
                f"momentum_range_{species.value}",
                not range_violations,
                len(range_violations),
                0,
                violations=range_violations,
            )
    return report


# -- operator ------------------------------------------------------------------


def default_check_sectors(n_sites: int) -> list[SectorKey]:
    """Sectors covered by the operator self-checks at size N."""
    if n_sites <= 6:
        return [SectorKey(q, up) for q in range(n_sites + 1) for up in range(n_sites - q + 1)]
    keys = []
    for q in (0, 1, 2, 3):
        up = (n_sites - q) // 2
        keys.append(SectorKey(q, up))
    return keys


def verify_operator(n_sites: int, trials: int = 50, seed: int = 42, tol: float = 1e-12, sectors=None) -> VerificationReport:
    geometry = ChainGeometry(n_sites)
    op = OperatorHandle(geometry)
    report = VerificationReport({"N": n_sites, "trials": trials, "seed": seed})
    with _Timer(report):
        for key in sectors or default_check_sectors(n_sites):
            sector = sector_for(geometry, key)
            sub = operator_self_checks(op, sector, trials, seed, tol)
            report.extend(sub, prefix=f"N{n_sites}_Q{key.n_holes}_up{key.n_up}_")
    return report
