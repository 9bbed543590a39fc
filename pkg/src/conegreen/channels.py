"""Hydrogen Mellin symbols restricted to one angular-momentum channel.

On the span of the spherical harmonics Y_lm the Laplace-Beltrami operator
acts as -l(l+1), so the conormal symbol becomes the scalar quadratic
``(w^2 - w - l(l+1))/2`` with roots -l and l+1. The projections P_l are
kept symbolic: every function here works on a single channel index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from .algebra import E, FactoredRationalW, ParamPoly, PolyW, Z


@dataclass(frozen=True, order=True)
class Channel:
    l: int

    def __post_init__(self):
        if not isinstance(self.l, int) or self.l < 0:
            raise ValueError(f"channel index must be a non-negative integer, got {self.l!r}")


def _l(l) -> int:
    return Channel(l).l if not isinstance(l, Channel) else l.l


@dataclass(frozen=True)
class ChannelSymbol:
    """h(r, w) = h0(w) + r h1 + r^2 h2 on channel l."""

    channel: Channel
    h0: PolyW
    h1: ParamPoly = Z
    h2: ParamPoly = E


def channel_symbol(l) -> ChannelSymbol:
    l = _l(l)
    return ChannelSymbol(Channel(l), conormal_symbol(l))


def conormal_symbol(l) -> PolyW:
    """``(w^2 - w - l(l+1)) / 2``."""
    l = _l(l)
    half = Fraction(1, 2)
    return PolyW([-half * l * (l + 1), -half, half])


def sigma_inverse(l) -> FactoredRationalW:
    """Channel-l inverse of the conormal symbol, ``2/((w+l)(w-l-1))``."""
    l = _l(l)
    return FactoredRationalW(PolyW.const(2), {-l: 1, l + 1: 1})


def nonbijectivity_points(l) -> Tuple[int, int]:
    l = _l(l)
    return (-l, l + 1)


def channel_of_point(w0: int) -> Channel:
    """The unique channel whose conormal symbol vanishes at the integer w0."""
    return Channel(-w0 if w0 <= 0 else w0 - 1)


def principal_part_sigma_inverse(w0: int) -> Tuple[Channel, Fraction]:
    """Residue of the inverse conormal symbol at an integer w0.

    The coefficient multiplies the projection P_l of the returned channel:
    ``-2/(2l+1)`` on the left branch (w0 = -l), ``+2/(2l+1)`` on the right
    (w0 = l+1).
    """
    if w0 != int(w0):
        raise ValueError("non-bijectivity points are integers")
    w0 = int(w0)
    ch = channel_of_point(w0)
    sign = -1 if w0 <= 0 else 1
    return ch, Fraction(2 * sign, 2 * ch.l + 1)


@dataclass(frozen=True)
class WeightData:
    """Weight gamma with optional auxiliary weight gamma_tilde > gamma."""

    gamma: Fraction
    gamma_tilde: Optional[Fraction] = None
    theta: str = "(-inf,0]"

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if self.gamma_tilde is not None:
            gt = Fraction(self.gamma_tilde)
            object.__setattr__(self, "gamma_tilde", gt)
            if gt <= self.gamma:
                raise ValueError("gamma_tilde must exceed gamma")


@dataclass(frozen=True)
class AdmissibilityReport:
    weight_ok: bool
    exit_ok: bool
    in_window: bool
    messages: Tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return self.weight_ok and self.exit_ok and self.in_window


def check_admissibility(weights: WeightData, energy=None) -> AdmissibilityReport:
    """Check gamma not in Z+1/2, E < 0 and 1/2 < gamma < 3/2 as separate flags.

    ``energy`` may be a rational or None (symbolic E, assumed negative).
    """
    g = weights.gamma
    msgs = []
    weight_ok = (g - Fraction(1, 2)).denominator != 1
    if not weight_ok:
        msgs.append(f"gamma={g} lies in Z+1/2: the conormal symbol is not invertible on the weight line")
    if energy is None:
        exit_ok = True
    else:
        exit_ok = Fraction(energy) < 0
        if not exit_ok:
            msgs.append(f"E={energy} >= 0 violates the exit condition")
    window = Fraction(1, 2) < g < Fraction(3, 2)
    if not window:
        msgs.append(f"gamma={g} is outside (1/2, 3/2)")
    return AdmissibilityReport(weight_ok, exit_ok, window, tuple(msgs))
