"""Taylor coefficients of the parametrix symbol, channel by channel.

Order r^i of ``PA = 1 + G`` gives

    sum_{j=0}^{min(i,2)} (T^{2-j} hinv_{i-j}) h_j = delta_{i0}

with h_0 the conormal symbol, h_1 = Z and h_2 = E, hence

    hinv_0 = h_0^{-1}(w - 2)
    hinv_i = -[ Z T^{-1} hinv_{i-1} + E T^{-2} hinv_{i-2} ] h_0^{-1}(w - 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from .algebra import E, FactoredRationalW, PolyW, Z
from .channels import Channel, _l, conormal_symbol, sigma_inverse


@dataclass(frozen=True)
class ParametrixCoefficients:
    channel: Channel
    coeffs: Tuple[FactoredRationalW, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


def parametrix_order0(l) -> FactoredRationalW:
    return sigma_inverse(l).shift(-2)


@lru_cache(maxsize=None)
def _coefficient(l: int, i: int) -> FactoredRationalW:
    if i == 0:
        return parametrix_order0(l)
    acc = _coefficient(l, i - 1).shift(-1) * Z
    if i >= 2:
        acc = acc + _coefficient(l, i - 2).shift(-2) * E
    return -(acc * parametrix_order0(l))


def parametrix_coefficient(l, i: int) -> FactoredRationalW:
    """hinv_i on channel l (memoized per (l, i))."""
    if i < 0:
        raise ValueError("order must be non-negative")
    return _coefficient(_l(l), i)


def parametrix(l, order: int) -> ParametrixCoefficients:
    return ParametrixCoefficients(
        Channel(_l(l)), tuple(parametrix_coefficient(l, i) for i in range(order + 1))
    )


def defining_relation(coeffs: Sequence[FactoredRationalW], l, i: int) -> FactoredRationalW:
    """Left-hand side ``sum_j (T^{2-j} hinv_{i-j}) h_j`` at order i."""
    h = [FactoredRationalW(conormal_symbol(l)), FactoredRationalW(PolyW.const(Z)),
         FactoredRationalW(PolyW.const(E))]
    acc = FactoredRationalW.zero()
    for j in range(min(i, 2) + 1):
        acc = acc + coeffs[i - j].shift(2 - j) * h[j]
    return acc


def verify_defining_relations(
    l, order: int, coeffs: Optional[Sequence[FactoredRationalW]] = None
) -> List[bool]:
    """Per-order exact check of the defining relations for i = 0..order.

    ``coeffs`` defaults to the computed coefficients; passing a tampered list
    is how the negative control works.
    """
    if coeffs is None:
        coeffs = parametrix(l, order).coeffs
    one = FactoredRationalW.one()
    zero = FactoredRationalW.zero()
    return [defining_relation(coeffs, l, i) == (one if i == 0 else zero) for i in range(order + 1)]


def pole_inventory(l, i: int) -> List[Tuple[int, int]]:
    out = []
    for q, m in parametrix_coefficient(l, i).poles():
        if q.denominator != 1:
            raise ValueError(f"non-integral pole {q} in the hydrogen parametrix")
        out.append((int(q), m))
    return out
