"""Sector spectra: dense for small sectors, Lanczos for the lowest few levels.

Crystal momenta follow the physical convention T v = exp(-iK) v, where T
moves every site content from alpha to alpha + 1.  With this sign the momentum
of a state is the sum of its quasiparticle momenta modulo 2 pi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from anyonchain.basis import CapacityError, SectorBasis, translate_columns
from anyonchain.hamiltonian import OperatorHandle, apply_to_array, build_dense, norm_estimate


class ConvergenceError(RuntimeError):
    def __init__(self, message, iterations):
        super().__init__(f"{message} after {iterations} iterations")
        self.iterations = iterations


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    residuals: np.ndarray
    momenta: np.ndarray | None
    norm_H: float
    tolerance: float
    mode: str

    def __len__(self):
        return len(self.eigenvalues)


def lanczos_lowest(matvec, dim, k, *, tol=1e-10, scale=1.0, max_iter=None, rng=None):
    """k lowest eigenpairs of a real symmetric (or Hermitian) operator.

    Each eigenpair comes from a separate Lanczos run with full
    reorthogonalisation against the Krylov basis and against every pair already
    locked, so degenerate eigenvalues are returned with their multiplicity.

    Args:
        matvec: callable mapping a (dim,) vector to H @ vector.
        dim: dimension of the space.
        k: number of eigenpairs, k < dim.
        tol: convergence threshold on ||H v - lambda v|| / scale.
        scale: norm estimate of H.
        max_iter: Krylov dimension cap per run (defaults to dim).
        rng: numpy Generator for starting vectors.

    Returns:
        (eigenvalues, eigenvectors) with eigenvectors as columns.
    """
    if not 1 <= k < dim:
        raise ValueError(f"need 1 <= k < dim, got k={k}, dim={dim}")
    rng = np.random.default_rng(0) if rng is None else rng
    max_iter = dim if max_iter is None else max_iter
    locked_vals: list[float] = []
    locked = np.zeros((dim, 0))
    total_iters = 0
    for _ in range(k):
        v = rng.standard_normal(dim)
        v -= locked @ (locked.T @ v)
        v /= np.linalg.norm(v)
        basis = [v]
        alpha, beta = [], []
        found = None
        for j in range(min(max_iter, dim - locked.shape[1])):
            total_iters += 1
            w = matvec(basis[j])
            alpha.append(float(basis[j] @ w))
            q = np.array(basis).T
            # two passes of classical Gram-Schmidt against Krylov and locked vectors
            for _pass in range(2):
                w = w - q @ (q.T @ w)
                w = w - locked @ (locked.T @ w)
            b = float(np.linalg.norm(w))
            theta, s = scipy.linalg.eigh_tridiagonal(np.array(alpha), np.array(beta))
            bound = abs(b * s[-1, 0])
            exhausted = b <= 1e-14 * max(scale, 1.0)
            if bound <= tol * scale or exhausted:
                x = q @ s[:, 0]
                x /= np.linalg.norm(x)
                res = np.linalg.norm(matvec(x) - theta[0] * x) / scale
                if res <= tol or exhausted:
                    found = (theta[0], x)
                    break
            beta.append(b)
            basis.append(w / b)
        if found is None:
            raise ConvergenceError("Lanczos did not converge", total_iters)
        locked_vals.append(found[0])
        locked = np.column_stack([locked, found[1]])
    order = np.argsort(locked_vals, kind="stable")
    return np.array(locked_vals)[order], locked[:, order]


def _clusters(values, threshold):
    groups, start = [], 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > threshold:
            groups.append((start, i))
            start = i
    return groups


def resolve_momenta(sector: SectorBasis, values: np.ndarray, vectors: np.ndarray, threshold: float):
    """Diagonalise T inside each degenerate cluster.

    Returns (momenta, rotated vectors, worst deviation of T's cluster
    eigenvalues from the unit circle).
    """
    n = sector.n_sites
    vectors = vectors.astype(complex)
    momenta = np.empty(len(values))
    unit_defect = 0.0
    for lo, hi in _clusters(values, threshold):
        v = vectors[:, lo:hi]
        t = v.conj().T @ translate_columns(sector, v)
        form, z = scipy.linalg.schur(t, output="complex")
        phases = np.diag(form)
        unit_defect = max(unit_defect, float(np.max(np.abs(np.abs(phases) - 1.0))))
        k = -np.angle(phases)
        # snap to the 2 pi / N grid and map into (-pi, pi]
        steps = np.round(k * n / (2 * np.pi))
        if np.max(np.abs(k * n / (2 * np.pi) - steps)) > 1e-8 * n:
            raise ConvergenceError("translation eigenvalues are off the 2 pi/N grid", 0)
        steps = steps % n
        steps[steps > n / 2] -= n
        momenta[lo:hi] = 2 * np.pi * steps / n
        vectors[:, lo:hi] = v @ z
    return momenta, vectors, unit_defect


def sector_spectrum(
    op: OperatorHandle,
    sector: SectorBasis,
    mode: str = "dense",
    k: int = 6,
    *,
    vectors: bool = False,
    momenta: bool = False,
    tol: float | None = None,
    max_iter: int | None = None,
    seed: int = 42,
) -> SpectrumResult:
    """Exact eigenvalues of H on one sector.

    ``mode='dense'`` returns the full spectrum (residual bound 1e-11 relative
    to ||H||); ``mode='iterative'`` returns the k lowest levels via Lanczos
    (bound 1e-9).  With ``momenta`` the iterative result is extended past k
    until the highest degenerate cluster is complete.  Momenta require eigenvectors and are resolved inside
    clusters of width 1e-10 * ||H||.
    """
    h_norm = norm_estimate(op, sector)
    need_vectors = vectors or momenta
    if mode == "dense":
        tol = 1e-11 if tol is None else tol
        if sector.size > op.dense_limit:
            raise CapacityError(
                f"sector of size {sector.size} exceeds the dense limit {op.dense_limit}"
            )
        mat = build_dense(op, sector)
        if need_vectors:
            vals, vecs = np.linalg.eigh(mat)
        else:
            vals, vecs = np.linalg.eigvalsh(mat), None
    elif mode == "iterative":
        tol = 1e-9 if tol is None else tol
        want = k
        while True:
            vals, vecs = lanczos_lowest(
                lambda x: apply_to_array(op, sector, x),
                sector.size,
                want,
                tol=tol * 0.1,
                scale=h_norm,
                max_iter=max_iter,
                rng=np.random.default_rng(seed),
            )
            # momenta need whole multiplets: grow k until the top cluster closes
            if not momenta or want + 1 >= sector.size:
                break
            if vals[-1] - vals[k - 1] > 1e-10 * h_norm:
                vals, vecs = vals[:-1], vecs[:, :-1]
                break
            want += 1
    else:
        raise ValueError(f"unknown mode {mode!r}; expected 'dense' or 'iterative'")

    if vecs is not None:
        hv = apply_to_array(op, sector, vecs)
        residuals = np.linalg.norm(hv - vecs * vals[None, :], axis=0) / h_norm
    else:
        residuals = np.full(len(vals), np.nan)
    ks = None
    if momenta:
        ks, vecs, _ = resolve_momenta(sector, vals, vecs, 1e-10 * h_norm)
    return SpectrumResult(
        eigenvalues=vals,
        eigenvectors=vecs if vectors else None,
        residuals=residuals,
        momenta=ks,
        norm_H=h_norm,
        tolerance=tol,
        mode=mode,
    )
