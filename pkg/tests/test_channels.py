from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conegreen.algebra import FactoredRationalW, PolyW, principal_part
from conegreen.channels import (
    Channel,
    WeightData,
    channel_of_point,
    channel_symbol,
    check_admissibility,
    conormal_symbol,
    nonbijectivity_points,
    principal_part_sigma_inverse,
    sigma_inverse,
)


@given(st.integers(0, 30))
def test_conormal_roots(l):
    h0 = conormal_symbol(l)
    for q in nonbijectivity_points(l):
        assert h0(q).is_zero()
    assert FactoredRationalW(h0) * sigma_inverse(l) == FactoredRationalW.one()


def test_channel_symbol_fields():
    s = channel_symbol(2)
    assert s.h0(0).constant_value() == -3
    assert str(s.h1) == "Z" and str(s.h2) == "E"


@pytest.mark.parametrize("l", range(21))
def test_residues_match_partial_fractions(l):
    for w0, expected in ((-l, Fraction(-2, 2 * l + 1)), (l + 1, Fraction(2, 2 * l + 1))):
        ch, res = principal_part_sigma_inverse(w0)
        assert ch == Channel(l) and res == expected
        [(k, c)] = principal_part(sigma_inverse(l), w0)
        assert k == 1 and c.constant_value() == res


def test_channel_of_point_is_unique():
    assert [channel_of_point(w).l for w in (-2, -1, 0, 1, 2, 3)] == [2, 1, 0, 0, 1, 2]


def test_invalid_channel():
    with pytest.raises(ValueError):
        Channel(-1)


@pytest.mark.parametrize("gamma,ok", [(1, True), (Fraction(3, 4), True), (Fraction(1, 2), False),
                                      (Fraction(3, 2), False), (2, False)])
def test_admissibility(gamma, ok):
    assert check_admissibility(WeightData(gamma)).ok is ok


def test_positive_energy_is_flagged():
    rep = check_admissibility(WeightData(1), energy=Fraction(1, 3))
    assert not rep.exit_ok and not rep.ok


def test_gamma_tilde_must_exceed_gamma():
    with pytest.raises(ValueError):
        WeightData(1, 1)
