"""Frobenius power-series oracle for the hydrogen radial equation.

On channel l, writing u = r^l sum_k c_k r^k, the Fuchs-type equation

    [ 1/2 (-r d/dr)^2 - 1/2 (-r d/dr) - l(l+1)/2 + rZ + r^2 E ] u = 0

matches powers r^{l+k} as

    k(k+2l+1)/2 c_k + Z c_{k-1} + E c_{k-2} = 0,

which gives the regular solution with c_0 = 1. Nothing here touches the
parametrix machinery, so it serves as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import List, Sequence, Tuple

from .algebra import ONE, ZERO, E, ParamPoly, Z
from .channels import Channel, _l


class QuantumNumberError(ValueError):
    pass


@dataclass(frozen=True)
class RadialSeries:
    """Coefficients c_0..c_K of r^{l+k}."""

    channel: Channel
    coefficients: Tuple[ParamPoly, ...]

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def evaluate(self, r: float, Z_value: float, E_value: float) -> float:
        l = self.channel.l
        return sum(c.evaluate(Z_value, E_value) * r ** (l + k) for k, c in enumerate(self.coefficients))


def frobenius_series(l, K: int) -> RadialSeries:
    l = _l(l)
    if K < 0:
        raise ValueError("order must be non-negative")
    c: List[ParamPoly] = [ONE]
    for k in range(1, K + 1):
        prev2 = c[k - 2] if k >= 2 else ZERO
        c.append((Z * c[k - 1] + E * prev2) * Fraction(-2, k * (k + 2 * l + 1)))
    return RadialSeries(Channel(l), tuple(c))


def radial_residual(l, coefficients: Sequence[ParamPoly]) -> List[ParamPoly]:
    """k-th coefficient ``k(k+2l+1)/2 c_k + Z c_{k-1} + E c_{k-2}``, k = 0..K."""
    l = _l(l)
    c = list(coefficients)
    out = []
    for k in range(len(c)):
        acc = c[k] * Fraction(k * (k + 2 * l + 1), 2)
        if k >= 1:
            acc = acc + Z * c[k - 1]
        if k >= 2:
            acc = acc + E * c[k - 2]
        out.append(acc)
    return out


def apply_radial_operator(s: RadialSeries) -> List[ParamPoly]:
    return radial_residual(s.channel, s.coefficients)


def eigenstate_series(n: int, l, K: int) -> RadialSeries:
    """Frobenius series at the bound-state energy E_n = -Z^2/(2n^2)."""
    l = _l(l)
    if n < 1 or l >= n:
        raise QuantumNumberError(f"need 0 <= l < n, got n={n}, l={l}")
    e_n = ParamPoly.monomial(Fraction(-1, 2 * n * n), z=2)
    s = frobenius_series(l, K)
    return RadialSeries(s.channel, tuple(c.substitute(E=e_n) for c in s.coefficients))


def exp_series(rate: ParamPoly, K: int) -> List[ParamPoly]:
    """Taylor coefficients of exp(rate * r) through r^K."""
    return [rate ** k * Fraction(1, factorial(k)) for k in range(K + 1)]


def laguerre_state_series(n: int, l, K: int) -> List[ParamPoly]:
    """Closed-form bound state r^{-l} R_nl, normalized to 1 at r=0, through r^K.

    ``exp(-Zr/n) L^{(2l+1)}_{n-l-1}(2Zr/n) / L^{(2l+1)}_{n-l-1}(0)``.
    """
    l = _l(l)
    if n < 1 or l >= n:
        raise QuantumNumberError(f"need 0 <= l < n, got n={n}, l={l}")
    m, alpha = n - l - 1, 2 * l + 1
    lag0 = comb(m + alpha, m)
    poly = [
        ParamPoly.monomial(Fraction((-1) ** j * comb(m + alpha, m - j) * 2 ** j, factorial(j) * n ** j * lag0), z=j)
        for j in range(m + 1)
    ]
    return mul_series(poly, exp_series(ParamPoly.monomial(Fraction(-1, n), z=1), K), K)


def mul_series(a: Sequence[ParamPoly], b: Sequence[ParamPoly], K: int) -> List[ParamPoly]:
    out = []
    for k in range(K + 1):
        acc = ZERO
        for i in range(k + 1):
            if i < len(a) and k - i < len(b):
                acc = acc + a[i] * b[k - i]
        out.append(acc)
    return out


def divide_series(a: Sequence[ParamPoly], b: Sequence[ParamPoly], K: int) -> List[ParamPoly]:
    """Truncated power-series quotient a/b; b[0] must be a nonzero constant."""
    b0 = b[0].constant_value()
    q: List[ParamPoly] = []
    for k in range(K + 1):
        acc = a[k] if k < len(a) else ZERO
        for i in range(1, k + 1):
            if i < len(b):
                acc = acc - b[i] * q[k - i]
        q.append(acc / b0)
    return q
