from fractions import Fraction

import pytest

from conegreen.algebra import E, ONE, ZERO, FactoredRationalW, Z
from conegreen.green import (
    CUT_MINUS_ONE,
    CUT_V,
    GI,
    GII,
    MUL_R2E,
    MUL_RZ_PLUS_R2E,
    OP_H0,
    OP_H0_PLUS_ZR,
    AsymptoticTerm,
    MellinMarker,
    PoleOnContourError,
    Strip,
    WeightData,
    assemble,
    canonicalize_marker,
    contour_terms,
    expand_combination,
    gii_terms,
    specialize_energy,
    strip_poles,
    substitute_parameters,
)

from ledger_rows import as_rows, expected_sorted, gi_displays, gii_displays

L = 6


@pytest.fixture(scope="module")
def expansion():
    return assemble(WeightData(1), 2, L)


@pytest.mark.parametrize("key", sorted(gi_displays()))
def test_gi_display(expansion, key):
    assert as_rows(expansion.terms, GI, *key) == expected_sorted(gi_displays()[key])


@pytest.mark.parametrize("key", sorted(gii_displays(L)))
def test_gii_display(expansion, key):
    assert as_rows(expansion.terms, GII, *key) == expected_sorted(gii_displays(L)[key])


def test_first_term_of_each_channel_is_r_to_the_l(expansion):
    for l in range(3):
        assert min(t.r_power for t in expansion.channel_terms(l)) == l


def _marker(src, prefix, pt):
    return MellinMarker(src, prefix, CUT_V if src == GI else CUT_MINUS_ONE, pt)


def test_grouped_channel0(expansion):
    g = expansion.group(0)
    assert g.ok
    assert g.series == ((0, ONE), (1, -Z), (2, (Z * Z - E) * Fraction(1, 3)))
    assert g.merged_functional() == [
        (ONE * -2, _marker(GII, OP_H0, 0)),
        (ONE * -2, _marker(GI, MUL_RZ_PLUS_R2E, 0)),
    ]


def test_grouped_channel1():
    g = assemble(WeightData(1), 3, 1).group(1)
    assert g.ok and g.q_z_inverse_power == 1
    assert g.series == ((1, Z), (2, Z * Z * Fraction(-1, 2)), (3, (Z * Z - E * 2) * Z * Fraction(1, 10)))
    c = Fraction(-2, 3)
    printed = [
        (ONE * c, _marker(GII, OP_H0_PLUS_ZR, -1)),
        (ONE * c, _marker(GI, MUL_R2E, -1)),
        (Z * c, _marker(GII, OP_H0, 0)),
        (Z * c, _marker(GI, MUL_RZ_PLUS_R2E, 0)),
    ]
    assert expand_combination(g.merged_functional()) == expand_combination(printed)
    assert sorted(map(str, g.merged_functional())) == sorted(map(str, printed))


@pytest.mark.parametrize("gamma", [Fraction(3, 4), Fraction(1), Fraction(5, 4)])
def test_no_logs_and_simple_poles(gamma):
    w = WeightData(gamma)
    g = assemble(w, 3, 6)
    assert g.log_free
    assert all(m == 1 for *_, m in strip_poles(w, 3, 6))


@pytest.mark.parametrize("gamma", [Fraction(3, 4), Fraction(5, 4)])
def test_gamma_independence_inside_window(gamma):
    a, b = assemble(WeightData(1), 2, 3), assemble(WeightData(gamma), 2, 3)
    assert a.terms == b.terms


def test_orientation_flip_negates():
    f = FactoredRationalW(2, {0: 1, 1: 1})
    s = Strip(Fraction(-1, 2), Fraction(3, 2))
    base = MellinMarker(GI, "plain", CUT_V, 0)
    plus = contour_terms(f, s, 0, base, 0)
    minus = contour_terms(f, s.flipped(), 0, base, 0)
    assert [t.coeff for t in minus] == [-t.coeff for t in plus]


def test_pole_on_contour():
    f = FactoredRationalW(2, {1: 1})
    with pytest.raises(PoleOnContourError):
        contour_terms(f, Strip(Fraction(1), Fraction(2)), 0, MellinMarker(GI, "plain", CUT_V, 0), 0)


def test_double_pole_gives_log_terms():
    f = FactoredRationalW(1, {0: 2})
    terms = contour_terms(f, Strip(-1, 1), 0, MellinMarker(GI, "plain", CUT_V, 0), 0)
    assert {(t.log_power, t.marker.derivative_order) for t in terms} == {(1, 0), (0, 1)}
    log_term = next(t for t in terms if t.log_power == 1)
    assert log_term.coeff == -ONE


def test_gamma_tilde_too_small():
    with pytest.raises(ValueError):
        gii_terms(WeightData(1), Fraction(5, 2), 2, 3)


def test_inadmissible_weight():
    with pytest.raises(ValueError):
        assemble(WeightData(Fraction(1, 2)), 2, 2)


def test_canonicalization_shifts_point():
    t = AsymptoticTerm(0, 0, 0, Z * -2, MellinMarker(GI, "plain", CUT_V, 1), "Z", 0)
    c = canonicalize_marker(t)
    assert c.coeff == ONE * -2 and c.marker.point == 0 and c.marker.prefix == "multiply_rZ"


def test_record_roundtrip(expansion):
    assert [AsymptoticTerm.from_record(t.to_record()) for t in expansion.terms] == list(expansion.terms)


def test_energy_specialization():
    g = specialize_energy(assemble(WeightData(1), 3, 1), 2)
    assert dict(g.group(1).series)[3] == Z ** 3 * Fraction(1, 8)
    assert dict(g.group(0).series)[2] == Z * Z * Fraction(3, 8)


def test_numeric_substitution():
    g = substitute_parameters(assemble(WeightData(1), 2, 0), Fraction(1), Fraction(-1, 2))
    assert [c for _, c in g.group(0).series] == [ONE, -ONE, ONE * Fraction(1, 2)]


def test_rank_one_through_high_order():
    g = assemble(WeightData(1), 9, 3)
    assert all(g.group(l).ok for l in range(4))


def test_channel_cutoff_warning():
    assert assemble(WeightData(1), 3, 1).warnings
    assert not assemble(WeightData(1), 2, 2).warnings
