"""Explicit polynomial eigenbasis states evaluated on lattice configurations.

Up-spin positions are written z_i = eta_alpha and hole positions h_j; the
building block is the half-filled ground state polynomial

    Psi0[z] = prod_{i<j} (z_i - z_j)^2 * prod_i z_i .

States are returned unnormalised: the polynomial coefficients are the objects
under test.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from anyonchain.basis import (
    HOLE,
    UP,
    ChainGeometry,
    SectorBasis,
    SectorKey,
    StateVector,
    enumerate_sector,
)

ZERO_THRESHOLD = 1e-10


class Species(enum.Enum):
    SPINON = "spinon"
    HOLON = "holon"

    @classmethod
    def parse(cls, value) -> Species:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown species {value!r}; expected 'spinon' or 'holon'") from None


@dataclass(frozen=True)
class PairLabel:
    """Orbital labels (m, n) of a two-spinon or two-holon state on N sites."""

    species: Species
    m: int
    n: int
    n_sites: int

    def __post_init__(self):
        object.__setattr__(self, "species", Species.parse(self.species))

    @property
    def M(self) -> int:
        return (self.n_sites - 2) // 2

    @property
    def max_orbital(self) -> int:
        return self.M if self.species is Species.SPINON else self.M + 1

    @property
    def valid(self) -> bool:
        return self.n_sites % 2 == 0 and self.n_sites >= 2 and 0 <= self.n <= self.m <= self.max_orbital

    def require_valid(self) -> None:
        if not self.valid:
            raise ValueError(
                f"invalid {self.species.value} label (m={self.m}, n={self.n}) for N={self.n_sites}: "
                f"need N even and 0 <= n <= m <= {self.max_orbital}"
            )

    def __str__(self):
        return f"{self.species.value}({self.m},{self.n})"


def valid_labels(species, n_sites: int) -> list[PairLabel]:
    """All valid labels, ordered by m then n."""
    species = Species.parse(species)
    probe = PairLabel(species, 0, 0, n_sites)
    top = probe.max_orbital
    return [PairLabel(species, m, n, n_sites) for m in range(top + 1) for n in range(m + 1)]


def pair_sector(geometry: ChainGeometry, species) -> SectorBasis:
    """Sector holding the two-spinon (Q=0) or two-holon (Q=2) states."""
    n = geometry.n_sites
    _require_even(n)
    holes = 0 if Species.parse(species) is Species.SPINON else 2
    return sector_for(geometry, SectorKey(holes, (n - 2) // 2))


@lru_cache(maxsize=None)
def sector_for(geometry: ChainGeometry, key: SectorKey) -> SectorBasis:
    """Shared basis per (geometry, key), so separately built states compare by sector."""
    return enumerate_sector(geometry, key)


def _require_even(n):
    if n % 2:
        raise ValueError(f"N must be even, got {n}")


def _require_odd(n):
    if n % 2 == 0:
        raise ValueError(f"N must be odd, got {n}")


def ground_polynomial(z: np.ndarray) -> np.ndarray:
    """Psi0 evaluated row-wise on a (rows, M) array of up-spin coordinates."""
    rows, m = z.shape
    out = np.prod(z, axis=1) if m else np.ones(rows, dtype=complex)
    i, j = np.triu_indices(m, k=1)
    if i.size:
        out = out * np.prod((z[:, i] - z[:, j]) ** 2, axis=1)
    return out


def _spin_factors(z: np.ndarray, points: np.ndarray) -> np.ndarray:
    """prod_i (w - z_i) for every row of z and every w in ``points``: (rows, len(points))."""
    return np.prod(points[None, :, None] - z[:, None, :], axis=2)


def _up_coordinates(sector: SectorBasis) -> np.ndarray:
    return sector.geometry.coordinates[sector.positions(UP) - 1]


def ground_state(geometry: ChainGeometry) -> StateVector:
    n = geometry.n_sites
    _require_even(n)
    sector = sector_for(geometry, SectorKey(0, n // 2))
    return StateVector(sector, ground_polynomial(_up_coordinates(sector)))


def two_spinon_state(geometry: ChainGeometry, m: int, n: int) -> StateVector:
    """Spin-polarised two-spinon state

        Psi_mn[z] = sum_{alpha,beta} conj(eta_alpha)^m conj(eta_beta)^n
                    prod_i (eta_alpha - z_i)(eta_beta - z_i) Psi0[z]

    with M = (N-2)/2 up spins.  Labels outside 0..M are evaluated as well; the
    result is then zero up to rounding.
    """
    _require_even(geometry.n_sites)
    sector = pair_sector(geometry, Species.SPINON)
    z = _up_coordinates(sector)
    eta = geometry.coordinates
    factors = _spin_factors(z, eta)
    # the double sum factorises into two single-site sums
    sum_m = factors @ np.conj(eta) ** m
    sum_n = factors @ np.conj(eta) ** n
    return StateVector(sector, sum_m * sum_n * ground_polynomial(z))


def holon_pair_function(h1, h2, m: int, n: int):
    """phi_mn(h1, h2) = (h1 - h2)(h1^m h2^n + h1^n h2^m)."""
    return (h1 - h2) * (h1**m * h2**n + h1**n * h2**m)


def two_holon_state(geometry: ChainGeometry, m: int, n: int) -> StateVector:
    """Two-holon state phi_mn(h1, h2) prod_i (h1 - z_i)(h2 - z_i) Psi0[z].

    The holes at sites a < b enter as h1 = eta_a, h2 = eta_b.
    """
    _require_even(geometry.n_sites)
    sector = pair_sector(geometry, Species.HOLON)
    eta = geometry.coordinates
    z = _up_coordinates(sector)
    holes = eta[sector.positions(HOLE) - 1]
    h1, h2 = holes[:, 0], holes[:, 1]
    spin_part = np.prod((h1[:, None] - z) * (h2[:, None] - z), axis=1)
    amps = holon_pair_function(h1, h2, m, n) * spin_part * ground_polynomial(z)
    return StateVector(sector, amps)


def pair_state(label: PairLabel) -> StateVector:
    geometry = ChainGeometry(label.n_sites)
    if label.species is Species.SPINON:
        return two_spinon_state(geometry, label.m, label.n)
    return two_holon_state(geometry, label.m, label.n)


def amplitude_bound(label: PairLabel) -> float:
    """Upper bound on any single amplitude of ``pair_state(label)``.

    Every factor |eta - z| is at most 2, which gives
    |Psi0| <= 2^(M(M-1)), the spin factors <= 4^M, and the orbital sums <= N^2
    (spinons) or |phi| <= 4 (holons).
    """
    M = label.M
    base = 2.0 ** (M * (M - 1)) * 4.0**M
    if label.species is Species.SPINON:
        return base * label.n_sites**2
    return base * 4.0


def vanishes(state: StateVector, bound: float, threshold: float = ZERO_THRESHOLD) -> bool:
    return state.norm <= threshold * bound


def localized_state(geometry: ChainGeometry, species, alpha: int) -> StateVector:
    """Single spinon or holon localised at site alpha of an odd chain.

    Both carry the amplitude prod_i (eta_alpha - z_i) Psi0[z] with
    M = (N-1)/2 up spins; the holon additionally pins a hole at alpha.
    """
    n = geometry.n_sites
    _require_odd(n)
    geometry._check_site(alpha)
    species = Species.parse(species)
    M = (n - 1) // 2
    w = geometry.coordinates[alpha - 1]
    if species is Species.SPINON:
        sector = sector_for(geometry, SectorKey(0, M))
        z = _up_coordinates(sector)
        amps = np.prod(w - z, axis=1) * ground_polynomial(z)
        return StateVector(sector, amps)
    sector = sector_for(geometry, SectorKey(1, M))
    z = _up_coordinates(sector)
    hole_site = sector.positions(HOLE)[:, 0]
    amps = np.prod(w - z, axis=1) * ground_polynomial(z)
    amps = np.where(hole_site == alpha, amps, 0.0)
    return StateVector(sector, amps)


def gram_matrix(states) -> np.ndarray:
    """G[i, j] = <state_i | state_j>."""
    states = list(states)
    if not states:
        return np.zeros((0, 0), dtype=complex)
    sector = states[0].sector
    if any(s.sector is not sector for s in states):
        raise ValueError("all states must belong to the same sector")
    a = np.array([s.amplitudes for s in states])
    g = a.conj() @ a.T
    # exact Hermitian symmetry
    return 0.5 * (g + g.conj().T)
