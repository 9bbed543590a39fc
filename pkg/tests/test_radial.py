from fractions import Fraction

import pytest

from conegreen.algebra import E, ONE, ZERO, ParamPoly, Z
from conegreen.green import WeightData, assemble
from conegreen.radial import (
    QuantumNumberError,
    apply_radial_operator,
    divide_series,
    eigenstate_series,
    exp_series,
    frobenius_series,
    laguerre_state_series,
    radial_residual,
)


def test_channel0_coefficients():
    c = frobenius_series(0, 2).coefficients
    assert c == (ONE, -Z, (Z * Z - E) * Fraction(1, 3))


def test_channel1_coefficients():
    c = frobenius_series(1, 2).coefficients
    assert c == (ONE, Z * Fraction(-1, 2), (Z * Z - E * 2) * Fraction(1, 10))


@pytest.mark.parametrize("l", range(6))
def test_zero_residual(l):
    assert all(r.is_zero() for r in apply_radial_operator(frobenius_series(l, 10)))


def test_perturbation_is_detected():
    c = list(frobenius_series(2, 5).coefficients)
    c[3] = c[3] + E
    res = radial_residual(2, c)
    assert [k for k, r in enumerate(res) if not r.is_zero()][0] == 3


def test_ground_state_is_exponential():
    s = eigenstate_series(1, 0, 6)
    assert list(s.coefficients) == exp_series(-Z, 6)


def test_2p_state():
    assert eigenstate_series(2, 1, 2).coefficients == (ONE, Z * Fraction(-1, 2), Z * Z * Fraction(1, 8))


@pytest.mark.parametrize("n,l", [(n, l) for n in range(1, 6) for l in range(n)])
def test_laguerre_termination(n, l):
    K = 8
    s = list(eigenstate_series(n, l, K).coefficients)
    assert s == laguerre_state_series(n, l, K)
    poly = divide_series(s, exp_series(Z * Fraction(-1, n), K), K)
    assert all(c.is_zero() for c in poly[n - l:])


def test_quantum_number_error():
    with pytest.raises(QuantumNumberError):
        eigenstate_series(1, 1, 3)


def test_green_series_solves_radial_equation():
    g = assemble(WeightData(1), 2, 0).group(0)
    assert all(r.is_zero() for r in radial_residual(0, g.series_coefficients()))


def test_evaluate():
    s = frobenius_series(0, 2)
    assert s.evaluate(0.5, 1.0, -0.5) == pytest.approx(1 - 0.5 + 0.125)
