from fractions import Fraction

import pytest

from conegreen.algebra import FactoredRationalW, PolyW, Z
from conegreen.parametrix import (
    defining_relation,
    parametrix,
    parametrix_coefficient,
    pole_inventory,
    verify_defining_relations,
)

from closed_forms import CLOSED_FORMS


@pytest.mark.parametrize("l", range(11))
@pytest.mark.parametrize("i", range(3))
def test_printed_closed_forms(l, i):
    assert parametrix_coefficient(l, i) == CLOSED_FORMS[i](l)


def test_rendering_order0():
    assert str(parametrix_coefficient(0, 0)) == "2/((w−2)(w−3))"


@pytest.mark.parametrize("l", range(11))
def test_defining_relations(l):
    assert all(verify_defining_relations(l, 8))


def test_tampered_coefficients_fail():
    coeffs = list(parametrix(1, 3).coeffs)
    coeffs[2] = coeffs[2] + FactoredRationalW.const(Z)
    assert verify_defining_relations(1, 3, coeffs) == [True, True, False, False]


def test_order0_relation_is_identity():
    assert defining_relation(parametrix(0, 0).coeffs, 0, 0) == FactoredRationalW.one()


@pytest.mark.parametrize("l", range(6))
@pytest.mark.parametrize("i", range(7))
def test_pole_locations(l, i):
    """Poles of hinv_i sit at 2-l+j and l+3+j for 0 <= j <= i."""
    allowed = {2 - l + j for j in range(i + 1)} | {l + 3 + j for j in range(i + 1)}
    inv = pole_inventory(l, i)
    assert {q for q, _ in inv} <= allowed
    assert all(1 <= m <= i + 1 for _, m in inv)


@pytest.mark.parametrize("l", range(4))
def test_symbol_degree_decay(l):
    # hinv_i decays like w^{-2-i} at infinity
    for i in range(6):
        h = parametrix_coefficient(l, i)
        assert h.den_degree() - h.num.degree() >= 2


def test_l0_has_double_poles():
    # P_l P_l' = 0 does not separate poles inside one channel
    assert pole_inventory(0, 1) == [(2, 1), (3, 2), (4, 1)]
    assert pole_inventory(1, 1) == [(1, 1), (2, 1), (4, 1), (5, 1)]


def test_negative_order_rejected():
    with pytest.raises(ValueError):
        parametrix_coefficient(0, -1)
