"""Closed-form spinon/holon results: dispersions, shifted momenta, pair
energies, scattering coefficients, quantisation rules and state counting.

Units: hbar = 1, lattice spacing 1, so a ring of N sites has length L = N.
The statistical shift ``s`` is a parameter (default 1/4) so that the same
functions serve the fit against exact spectra.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, pi

from anyonchain.states import PairLabel, Species

DEFAULT_SHIFT = Fraction(1, 4)


def ground_energy(n_sites: int) -> float:
    """E0 = -pi^2 / (4N)."""
    return -(pi**2) / (4 * n_sites)


# -- dispersion ----------------------------------------------------------------


@dataclass(frozen=True)
class DispersionPoint:
    momentum: float
    energy: float
    velocity: float
    in_domain: bool = True


def momentum_domain(species, n_sites: int) -> tuple[float, float]:
    """Open interval on which the single-particle momenta of valid labels lie."""
    if Species.parse(species) is Species.SPINON:
        return 0.0, pi
    return -pi - pi / (2 * n_sites), pi / (2 * n_sites)


def dispersion(species, momentum: float, n_sites: int) -> DispersionPoint:
    """Single-particle energy and group velocity.

    spinon:  e(q) = q (pi - q)/2 + pi^2/(8 N^2),   v(q) = pi/2 - q
    holon:   e(p) = p (pi + p)/2 - pi^2/(8 N^2),   v(p) = pi/2 + p

    Momenta outside the physical interval are evaluated and flagged.
    """
    species = Species.parse(species)
    k = float(momentum)
    lo, hi = momentum_domain(species, n_sites)
    if species is Species.SPINON:
        energy = 0.5 * k * (pi - k) + pi**2 / (8 * n_sites**2)
        velocity = pi / 2 - k
        inside = lo < k < hi
    else:
        energy = 0.5 * k * (pi + k) - pi**2 / (8 * n_sites**2)
        velocity = pi / 2 + k
        # the lower end is reached by the (0, 0) holon label
        inside = lo <= k <= hi
    return DispersionPoint(k, energy, velocity, inside)


# -- shifted momenta -----------------------------------------------------------


@dataclass(frozen=True)
class ShiftedMomenta:
    """Single-particle momenta of the pair; ``first`` belongs to label m."""

    first: float
    second: float
    shift: Fraction | float
    species: Species

    @property
    def total(self) -> float:
        return self.first + self.second


def momentum_quanta(label: PairLabel, s=DEFAULT_SHIFT) -> tuple[Fraction, Fraction]:
    """Momenta of label m and label n in units of 2 pi / N, exact when s is rational.

    spinon:  q_m = N/2 - (m + 1/2 + s),   q_n = N/2 - (n + 1/2 - s)
    holon:   p_m = -N/2 + (m + s),        p_n = -N/2 + (n - s)
    """
    label.require_valid()
    s = Fraction(s) if isinstance(s, (int, Fraction)) else s
    half_n = Fraction(label.n_sites, 2)
    if label.species is Species.SPINON:
        return (
            half_n - (label.m + Fraction(1, 2) + s),
            half_n - (label.n + Fraction(1, 2) - s),
        )
    return -half_n + (label.m + s), -half_n + (label.n - s)


def single_particle_momenta(label: PairLabel, s=DEFAULT_SHIFT) -> ShiftedMomenta:
    a, b = momentum_quanta(label, s)
    unit = 2 * pi / label.n_sites
    return ShiftedMomenta(float(a) * unit, float(b) * unit, s, label.species)


def spacing_quanta(label: PairLabel, s=DEFAULT_SHIFT) -> Fraction:
    """|k_m - k_n| * N / (2 pi) for the pair (exact for rational s)."""
    a, b = momentum_quanta(label, s)
    return abs(a - b)


def pair_energy(label: PairLabel, s=DEFAULT_SHIFT) -> float:
    """E0 + e(k_m) + e(k_n) with the momenta shifted by s."""
    k = single_particle_momenta(label, s)
    n = label.n_sites
    return (
        ground_energy(n)
        + dispersion(label.species, k.first, n).energy
        + dispersion(label.species, k.second, n).energy
    )


# -- scattering ----------------------------------------------------------------


@dataclass(frozen=True)
class ScatteringTerm:
    l: int  # noqa: E741
    target: PairLabel
    coefficient: float


def scattering_terms(label: PairLabel) -> list[ScatteringTerm]:
    """Off-diagonal terms of H acting on the explicit pair state.

    Spinons scatter to (m + l, n - l), l = 1..min(M - m, n), with
    V_l = -(2 pi^2/N^2)(m - n + 2l).  Holons scatter to (m - l, n + l),
    l = 1..floor((m - n)/2), with V_l = (2 pi^2/N^2)(m - n).
    """
    label.require_valid()
    n_sites, m, n = label.n_sites, label.m, label.n
    g = 2 * pi**2 / n_sites**2
    terms = []
    if label.species is Species.SPINON:
        for l in range(1, min(label.M - m, n) + 1):  # noqa: E741
            target = PairLabel(Species.SPINON, m + l, n - l, n_sites)
            terms.append(ScatteringTerm(l, target, -g * (m - n + 2 * l)))
    else:
        for l in range(1, (m - n) // 2 + 1):  # noqa: E741
            target = PairLabel(Species.HOLON, m - l, n + l, n_sites)
            terms.append(ScatteringTerm(l, target, g * (m - n)))
    return terms


# -- quantisation rules --------------------------------------------------------


class RuleKind(enum.Enum):
    ANGULAR_MOMENTUM_2D = "2d"
    MOMENTUM_SPACING_1D = "1d"


@dataclass(frozen=True)
class QuantizationRule:
    """Allowed values fixed by the statistical parameter theta.

    2D relative angular momentum:  l_z = -theta/pi + 2m,  m integer.
    1D momentum spacing:           dp * L/(2 pi) = |theta|/pi + n,  n >= 0.

    ``theta_over_pi`` may be a Fraction, in which case membership is exact.
    """

    theta_over_pi: Fraction | float
    kind: RuleKind = RuleKind.MOMENTUM_SPACING_1D
    length: float = 2 * pi
    atol: float = field(default=1e-9, compare=False)

    def __post_init__(self):
        t = self.theta_over_pi
        if not -1 < t <= 1:
            raise ValueError(f"theta must lie in (-pi, pi], got theta/pi = {t}")
        if self.kind is RuleKind.MOMENTUM_SPACING_1D and not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")

    @classmethod
    def from_theta(cls, theta: float, kind=RuleKind.MOMENTUM_SPACING_1D, length=2 * pi):
        if not -pi < theta <= pi:
            raise ValueError(f"theta must lie in (-pi, pi], got {theta}")
        return cls(theta / pi, RuleKind(kind), length)

    @property
    def theta(self) -> float:
        return float(self.theta_over_pi) * pi

    @property
    def offset(self):
        """Fractional part of the allowed values (exact for Fraction input)."""
        if self.kind is RuleKind.MOMENTUM_SPACING_1D:
            return abs(self.theta_over_pi)
        return -self.theta_over_pi

    def _integer_part(self, value):
        """Returns the integer the value corresponds to, or None."""
        x = value - self.offset
        if self.kind is RuleKind.ANGULAR_MOMENTUM_2D:
            x = x / 2
        if isinstance(x, Fraction):
            return int(x) if x.denominator == 1 else None
        k = round(x)
        return k if abs(x - k) <= self.atol else None

    def allows(self, value) -> bool:
        """Membership test on the dimensionless value.

        1D: value = dp * L / (2 pi);  2D: value = l_z / hbar.
        """
        k = self._integer_part(value)
        if k is None:
            return False
        if self.kind is RuleKind.MOMENTUM_SPACING_1D:
            return k >= 0
        return True

    def allows_spacing(self, dp: float) -> bool:
        """Membership test on a physical momentum spacing."""
        return self.allows(dp * self.length / (2 * pi))

    def first_allowed(self, k: int) -> list:
        """The k smallest non-negative allowed dimensionless values."""
        if k < 1:
            raise ValueError("k must be >= 1")
        off = self.offset
        if self.kind is RuleKind.MOMENTUM_SPACING_1D:
            return [off + i for i in range(k)]
        start = math.ceil(-off / 2)
        return [off + 2 * (start + i) for i in range(k)]

    def first_spacings(self, k: int) -> list[float]:
        """Physical spacings dp = 2 pi / L * value for the k smallest values (1D only)."""
        if self.kind is not RuleKind.MOMENTUM_SPACING_1D:
            raise ValueError("spacings are defined for the 1D rule only")
        return [2 * pi / self.length * float(v) for v in self.first_allowed(k)]


def quantization_rules(rule: QuantizationRule, k: int = 3):
    """(membership predicate, k smallest non-negative allowed values)."""
    return rule.allows, rule.first_allowed(k)


# -- counting ------------------------------------------------------------------


@dataclass(frozen=True)
class CountingReport:
    n_sites: int
    # n_spinons -> number of many-spinon states
    counts: dict
    # n_spinons -> number of single-spinon orbitals M + 1
    orbitals: dict

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def hilbert_dimension(n_sites: int) -> CountingReport:
    """Count many-spinon states as spin-1/2 bosons in M + 1 orbitals.

    For N_sp spinons (N_sp = N mod 2) there are M + 1 orbitals with
    M = (N - N_sp)/2, i.e. 2(M + 1) = N - N_sp + 2 single-particle states,
    and binom(N - N_sp + 2 + N_sp - 1, N_sp) = binom(N + 1, N_sp) states.
    """
    if n_sites < 1:
        raise ValueError("N must be >= 1")
    counts, orbitals = {}, {}
    for n_sp in range(n_sites % 2, n_sites + 1, 2):
        M = (n_sites - n_sp) // 2
        single = 2 * (M + 1)
        counts[n_sp] = comb(single + n_sp - 1, n_sp)
        orbitals[n_sp] = M + 1
    return CountingReport(n_sites, counts, orbitals)
