import itertools
from fractions import Fraction
from math import pi

import pytest
from hypothesis import given
from hypothesis import strategies as st

from anyonchain.states import PairLabel, Species, valid_labels
from anyonchain.theory import (
    QuantizationRule,
    RuleKind,
    dispersion,
    ground_energy,
    hilbert_dimension,
    momentum_quanta,
    pair_energy,
    scattering_terms,
    single_particle_momenta,
    spacing_quanta,
)


def test_ground_energy():
    assert ground_energy(2) == pytest.approx(-(pi**2) / 8)


def test_spinon_dispersion_at_quarter_zone():
    p = dispersion("spinon", pi / 2, 16)
    assert p.energy == pytest.approx(1.238520, abs=1e-6)
    assert p.velocity == pytest.approx(0.0, abs=1e-15)
    assert p.in_domain


def test_holon_dispersion_at_zero():
    p = dispersion("holon", 0.0, 8)
    assert p.energy == pytest.approx(-0.019276, abs=1e-6)
    assert p.velocity == pytest.approx(pi / 2)


def test_domain_flags():
    assert not dispersion("spinon", 4.0, 8).in_domain
    assert dispersion("holon", -pi - pi / 16, 8).in_domain
    assert not dispersion("holon", 0.5, 8).in_domain


@given(st.floats(-4, 4), st.sampled_from(["spinon", "holon"]), st.integers(2, 40))
def test_dispersion_reflection_symmetry(k, species, n):
    # spinons are symmetric about pi/2, holons about -pi/2
    centre = pi / 2 if species == "spinon" else -pi / 2
    a = dispersion(species, centre + k, n)
    b = dispersion(species, centre - k, n)
    assert a.energy == pytest.approx(b.energy, abs=1e-12)
    assert a.velocity == pytest.approx(-b.velocity, abs=1e-12)


@given(st.floats(-4, 4), st.sampled_from(["spinon", "holon"]))
def test_velocity_is_derivative(k, species):
    h = 1e-5
    fd = (dispersion(species, k + h, 10).energy - dispersion(species, k - h, 10).energy) / (2 * h)
    assert fd == pytest.approx(dispersion(species, k, 10).velocity, abs=1e-8)


def test_spinon_momenta_values():
    k = single_particle_momenta(PairLabel("spinon", 7, 0, 16))
    assert k.first == pytest.approx(pi / 32)
    assert k.second == pytest.approx(31 * pi / 32)


def test_holon_momenta_values():
    k = single_particle_momenta(PairLabel("holon", 0, 0, 8))
    assert k.first == pytest.approx(-15 * pi / 16)
    assert k.second == pytest.approx(-17 * pi / 16)


def test_momentum_quanta_exact():
    assert momentum_quanta(PairLabel("spinon", 7, 0, 16)) == (Fraction(1, 4), Fraction(31, 4))
    assert momentum_quanta(PairLabel("holon", 1, 0, 8), s=0) == (Fraction(-3), Fraction(-4))
    with pytest.raises(ValueError):
        momentum_quanta(PairLabel("spinon", 4, 0, 8))


@pytest.mark.parametrize("species", ["spinon", "holon"])
@pytest.mark.parametrize("n", [4, 8, 12])
def test_spacing_is_half_odd(species, n):
    for label in valid_labels(species, n):
        d = spacing_quanta(label)
        assert d.denominator == 2


def test_pair_energies():
    assert pair_energy(PairLabel("spinon", 2, 0, 6)) == pytest.approx(pi**2 / 24)
    assert pair_energy(PairLabel("spinon", 0, 0, 6)) == pytest.approx(28 * pi**2 / 288)


def test_pair_energy_by_hand():
    # holon (1,0) on N=6 at s=1/4: p = 2 pi/6 * (-3 + 5/4) and 2 pi/6 * (-3 - 1/4)
    p1, p2 = 2 * pi / 6 * (-7 / 4), 2 * pi / 6 * (-13 / 4)
    e = -(pi**2) / 24 + sum(0.5 * p * (pi + p) - pi**2 / 288 for p in (p1, p2))
    assert pair_energy(PairLabel("holon", 1, 0, 6)) == pytest.approx(e)


def test_scattering_coefficients():
    terms = scattering_terms(PairLabel("spinon", 1, 1, 6))
    assert [(t.l, t.target.m, t.target.n) for t in terms] == [(1, 2, 0)]
    assert terms[0].coefficient == pytest.approx(-(pi**2) / 9)
    holon = scattering_terms(PairLabel("holon", 3, 0, 8))
    assert [(t.target.m, t.target.n) for t in holon] == [(2, 1)]
    assert holon[0].coefficient == pytest.approx(6 * pi**2 / 64)


def test_edge_labels_do_not_scatter():
    assert scattering_terms(PairLabel("spinon", 3, 0, 8)) == []
    assert scattering_terms(PairLabel("holon", 1, 0, 8)) == []


@pytest.mark.parametrize("n", [6, 10])
def test_scattering_targets_valid_and_same_total(n):
    for species in Species:
        for label in valid_labels(species, n):
            for term in scattering_terms(label):
                assert term.target.valid
                assert term.target.m + term.target.n == label.m + label.n


# -- quantisation ---------------------------------------------------------------


def test_semion_spacing_rule():
    rule = QuantizationRule.from_theta(1.5707963, "1d", 6.2831853)
    assert [float(v) for v in rule.first_allowed(3)] == pytest.approx([0.5, 1.5, 2.5], abs=1e-7)
    exact = QuantizationRule(Fraction(1, 2))
    assert exact.first_allowed(3) == [Fraction(1, 2), Fraction(3, 2), Fraction(5, 2)]
    assert exact.allows(Fraction(7, 2))
    assert not exact.allows(Fraction(3))
    assert not exact.allows(Fraction(-1, 2))


def test_bosons_and_fermions():
    assert QuantizationRule(Fraction(0)).first_allowed(2) == [0, 1]
    assert QuantizationRule(Fraction(1)).first_allowed(2) == [1, 2]


def test_angular_momentum_rule():
    rule = QuantizationRule(Fraction(1, 2), RuleKind.ANGULAR_MOMENTUM_2D)
    assert rule.first_allowed(3) == [Fraction(3, 2), Fraction(7, 2), Fraction(11, 2)]
    assert rule.allows(Fraction(-1, 2))
    assert not rule.allows(Fraction(1, 2))
    with pytest.raises(ValueError):
        rule.first_spacings(2)


def test_spacing_in_physical_units():
    rule = QuantizationRule(Fraction(1, 2), length=10.0)
    assert rule.first_spacings(2) == pytest.approx([2 * pi / 10 * 0.5, 2 * pi / 10 * 1.5])
    assert rule.allows_spacing(2 * pi / 10 * 2.5)


def test_theta_range():
    with pytest.raises(ValueError):
        QuantizationRule.from_theta(-pi)
    with pytest.raises(ValueError):
        QuantizationRule(Fraction(3, 2))
    QuantizationRule.from_theta(pi)


# -- counting -------------------------------------------------------------------


def brute_force_counts(n):
    """Multisets of N_sp spin-1/2 particles drawn from M + 1 orbitals."""
    counts = {}
    for n_sp in range(n % 2, n + 1, 2):
        single = 2 * ((n - n_sp) // 2 + 1)
        counts[n_sp] = sum(1 for _ in itertools.combinations_with_replacement(range(single), n_sp))
    return counts


@pytest.mark.parametrize("n", range(1, 11))
def test_counting_matches_brute_force(n):
    report = hilbert_dimension(n)
    assert report.counts == brute_force_counts(n)
    assert report.total == 2**n


def test_small_counts():
    assert hilbert_dimension(2).counts == {0: 1, 2: 3}
    assert hilbert_dimension(4).counts == {0: 1, 2: 10, 4: 5}
    assert hilbert_dimension(24).total == 16777216
    with pytest.raises(ValueError):
        hilbert_dimension(0)
