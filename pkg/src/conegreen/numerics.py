"""Floating-point evaluation of Mellin functionals on concrete radial profiles.

Profiles carry their value together with the Euler derivatives
``theta f = (-r d/dr) f`` and ``theta^2 f``; theta is a derivation, so
products with cutoffs stay closed-form. Polynomial Mellin symbols in w act
as the corresponding polynomials in theta, which is how op(h0) is applied
here (no Mellin inversion).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import comb, exp, log
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate
from scipy.special import genlaguerre

from .algebra import ParamPoly
from .green import (
    CUT_MINUS_ONE,
    CUT_V,
    GI,
    GII,
    OP_H0,
    PLAIN,
    ChannelGroup,
    MellinMarker,
    WeightData,
    assemble,
    expand_marker,
)


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, value, error):
        super().__init__(f"{message} (value={value!r}, error estimate={error!r})")
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 500
    upper: float = 80.0

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("quadrature tolerances must be positive")


Fn = Callable[[float], float]


@dataclass(frozen=True)
class RadialProfile:
    """f together with (-r d/dr) f and (-r d/dr)^2 f (None when unavailable)."""

    value: Fn
    euler1: Optional[Fn] = None
    euler2: Optional[Fn] = None
    support: Tuple[float, float] = (0.0, float("inf"))

    @classmethod
    def from_derivatives(cls, f: Fn, df: Fn, d2f: Fn, support=(0.0, float("inf"))) -> "RadialProfile":
        return cls(
            f,
            lambda r: -r * df(r),
            lambda r: r * df(r) + r * r * d2f(r),
            support,
        )

    def __call__(self, r):
        return self.value(r)

    def scaled(self, c: float) -> "RadialProfile":
        return RadialProfile(
            lambda r: c * self.value(r),
            None if self.euler1 is None else (lambda r: c * self.euler1(r)),
            None if self.euler2 is None else (lambda r: c * self.euler2(r)),
            self.support,
        )

    def __add__(self, other: "RadialProfile") -> "RadialProfile":
        def both(a, b):
            if a is None or b is None:
                return None
            return lambda r: a(r) + b(r)

        lo = min(self.support[0], other.support[0])
        hi = max(self.support[1], other.support[1])
        return RadialProfile(both(self.value, other.value), both(self.euler1, other.euler1),
                             both(self.euler2, other.euler2), (lo, hi))

    def __mul__(self, other: "RadialProfile") -> "RadialProfile":
        f, g = self, other
        e1 = e2 = None
        if f.euler1 is not None and g.euler1 is not None:
            e1 = lambda r: f.euler1(r) * g.value(r) + f.value(r) * g.euler1(r)
            if f.euler2 is not None and g.euler2 is not None:
                e2 = lambda r: (f.euler2(r) * g.value(r) + 2 * f.euler1(r) * g.euler1(r)
                                + f.value(r) * g.euler2(r))
        support = (max(f.support[0], g.support[0]), min(f.support[1], g.support[1]))
        return RadialProfile(lambda r: f.value(r) * g.value(r), e1, e2, support)


def power_profile(k: float, c: float = 1.0) -> RadialProfile:
    """c r^k; theta r^k = -k r^k."""
    return RadialProfile(lambda r: c * r ** k, lambda r: -k * c * r ** k, lambda r: k * k * c * r ** k)


def exp_profile(rate: float = 1.0, scale: float = 1.0) -> RadialProfile:
    """scale * exp(-rate r)."""
    return RadialProfile.from_derivatives(
        lambda r: scale * exp(-rate * r),
        lambda r: -rate * scale * exp(-rate * r),
        lambda r: rate * rate * scale * exp(-rate * r),
    )


def hydrogen_state(n: int, l: int, Z: float = 1.0) -> RadialProfile:
    """r^l exp(-Zr/n) L^{(2l+1)}_{n-l-1}(2Zr/n), normalized so r^{-l} u -> 1 at r = 0."""
    if n < 1 or not 0 <= l < n:
        raise ValueError(f"need 0 <= l < n, got n={n}, l={l}")
    m, alpha = n - l - 1, 2 * l + 1
    lag = genlaguerre(m, alpha)
    lag_r = Polynomial(lag.coef[::-1]) if m > 0 else Polynomial([float(lag.coef[-1])])
    lag_r = Polynomial(lag_r.coef * (2.0 * Z / n) ** np.arange(len(lag_r.coef)))
    g = Polynomial([0.0] * l + [1.0]) * lag_r / comb(m + alpha, m)
    a = Z / n
    dg, d2g = g.deriv(1), g.deriv(2)
    return RadialProfile.from_derivatives(
        lambda r: g(r) * exp(-a * r),
        lambda r: (dg(r) - a * g(r)) * exp(-a * r),
        lambda r: (d2g(r) - 2 * a * dg(r) + a * a * g(r)) * exp(-a * r),
    )


@dataclass(frozen=True)
class CutoffSpec:
    """omega(r) = 1 for r <= inner, 0 for r >= outer, polynomial smoothstep between."""

    inner: float = 1.0
    outer: float = 2.0
    smoothness: int = 4
    _step: Polynomial = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise ValueError("cutoff requires 0 < inner < outer")
        if self.smoothness < 0:
            raise ValueError("smoothness must be non-negative")
        k = self.smoothness
        # C^k smoothstep: t^{k+1} sum_j binom(k+j, j) binom(2k+1, k-j) (-t)^j
        coef = [0.0] * (2 * k + 2)
        for j in range(k + 1):
            coef[k + 1 + j] = comb(k + j, j) * comb(2 * k + 1, k - j) * (-1) ** j
        object.__setattr__(self, "_step", Polynomial(coef))

    def derivative(self, r: float, order: int = 0) -> float:
        if r <= self.inner:
            return 1.0 if order == 0 else 0.0
        if r >= self.outer:
            return 0.0
        width = self.outer - self.inner
        t = (r - self.inner) / width
        if order == 0:
            return 1.0 - self._step(t)
        return -self._step.deriv(order)(t) / width ** order

    def __call__(self, r: float) -> float:
        return self.derivative(r)

    def profile(self) -> RadialProfile:
        return RadialProfile.from_derivatives(
            self, lambda r: self.derivative(r, 1), lambda r: self.derivative(r, 2), (0.0, self.outer)
        )


@dataclass(frozen=True)
class CutoffSet:
    """The three cutoffs entering the functionals.

    ``omega`` and ``omega_tilde`` with omega * omega_tilde = omega (so
    omega_tilde is identically 1 on supp omega), and ``omega_tilde_prime``;
    the composite is omega'' = omega_tilde_prime * omega.
    """

    omega: CutoffSpec = CutoffSpec(1.0, 2.0)
    omega_tilde: CutoffSpec = CutoffSpec(2.0, 3.0)
    omega_tilde_prime: CutoffSpec = CutoffSpec(1.5, 2.5)

    def __post_init__(self):
        if self.omega.outer > self.omega_tilde.inner:
            raise ValueError("omega_tilde must equal 1 on the support of omega")

    def omega_dd(self) -> RadialProfile:
        return self.omega_tilde_prime.profile() * self.omega.profile()

    def omega_dd_minus_one(self) -> RadialProfile:
        p = self.omega_dd() + power_profile(0, -1.0)
        start = min(self.omega.inner, self.omega_tilde_prime.inner)
        return RadialProfile(p.value, p.euler1, p.euler2, (start, float("inf")))

    def breakpoints(self) -> Tuple[float, ...]:
        pts = set()
        for c in (self.omega, self.omega_tilde, self.omega_tilde_prime):
            pts.update((c.inner, c.outer))
        return tuple(sorted(pts))


def apply_h0(f: RadialProfile, l: int) -> RadialProfile:
    """Pointwise ``(theta^2 - theta - l(l+1)) f / 2`` with theta = -r d/dr."""
    if f.euler1 is None or f.euler2 is None:
        raise ValueError("apply_h0 needs the first two Euler derivatives")
    ll = l * (l + 1)
    return RadialProfile(lambda r: 0.5 * (f.euler2(r) - f.euler1(r) - ll * f.value(r)), support=f.support)


def finite_difference_check(f: RadialProfile, r_samples: Sequence[float], rel_step: float = 2e-3) -> float:
    """Max relative mismatch of the Euler-derivative evaluators against 7-point stencils."""
    worst = 0.0
    for r in r_samples:
        h = rel_step * r
        v = [f.value(r + k * h) for k in range(-3, 4)]
        d1 = (-v[0] + 9 * v[1] - 45 * v[2] + 45 * v[4] - 9 * v[5] + v[6]) / (60 * h)
        d2 = (2 * v[0] - 27 * v[1] + 270 * v[2] - 490 * v[3] + 270 * v[4] - 27 * v[5] + 2 * v[6]) / (180 * h * h)
        fd1, fd2 = -r * d1, r * d1 + r * r * d2
        scale = max(abs(v[3]), abs(fd1), abs(fd2), 1e-300)
        worst = max(worst, abs(fd1 - f.euler1(r)) / scale, abs(fd2 - f.euler2(r)) / scale)
    return worst


def weighted_mellin(
    f,
    w,
    gamma: Optional[float] = None,
    quad: QuadratureSpec = QuadratureSpec(),
    derivative_order: int = 0,
    points: Sequence[float] = (),
):
    """``int_0^inf r^w f(r) (log r)^d dr / r`` by adaptive quadrature.

    If ``gamma`` is given, w must lie on the weight line Re w = 1/2 - gamma.
    The integral runs over the profile's support, truncated at ``quad.upper``.
    """
    w = complex(w)
    if gamma is not None and abs(w.real - (0.5 - gamma)) > 1e-12:
        raise ValueError(f"w={w} is not on the line Re w = {0.5 - gamma} of weight {gamma}")
    value = f.value if isinstance(f, RadialProfile) else f
    lo, hi = (f.support if isinstance(f, RadialProfile) else (0.0, float("inf")))
    hi = min(hi, quad.upper)
    if hi <= lo:
        return 0.0
    d = derivative_order
    a, b = w.real, w.imag

    def kernel(r, part):
        if r <= 0.0:
            return 0.0
        lr = log(r)
        mag = r ** (a - 1) * lr ** d * value(r)
        if b == 0.0:
            return mag if part == 0 else 0.0
        return mag * (np.cos(b * lr) if part == 0 else np.sin(b * lr))

    brk = [p for p in points if lo < p < hi]
    result = []
    for part in ((0, 1) if b != 0.0 else (0,)):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(
                    kernel, lo, hi, args=(part,), epsabs=quad.abs_tol, epsrel=quad.rel_tol,
                    limit=quad.max_subdivisions, points=brk or None,
                )
            except integrate.IntegrationWarning as exc:
                # rerun quietly to report the partial value
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    val, err = integrate.quad(kernel, lo, hi, args=(part,), epsabs=quad.abs_tol,
                                              epsrel=quad.rel_tol, limit=quad.max_subdivisions,
                                              points=brk or None)
                raise QuadratureError(str(exc).splitlines()[0], val, err) from None
        if err > max(quad.abs_tol, quad.rel_tol * abs(val)) * 10:
            raise QuadratureError("tolerance not reached", val, err)
        result.append(val)
    return result[0] if b == 0.0 else complex(result[0], result[1])


# -- the printed functionals --------------------------------------------------

def _bracket(u, l, Z, E, cut: CutoffSet, quad, point, with_zr=False, shift_terms="rZ+r2E"):
    pts = cut.breakpoints()
    vt = cut.omega_tilde.profile() * u
    h = apply_h0(vt, l)
    if with_zr:
        base, zr = h, power_profile(1, Z) * vt
        h = RadialProfile(lambda r: base.value(r) + zr.value(r), support=base.support)
    first = weighted_mellin(cut.omega_dd_minus_one() * h, point, quad=quad, points=pts)
    if shift_terms == "rZ+r2E":
        mult = RadialProfile(lambda r: Z * r + E * r * r)
    else:
        mult = RadialProfile(lambda r: E * r * r)
    second = weighted_mellin(cut.omega_dd() * mult * u, point, quad=quad, points=pts)
    return first + second


def q0_value(u: RadialProfile, Z: float, E: float, cut: CutoffSet = CutoffSet(),
             quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Q_0(u) = -2 [ (M (w''-1) op(h0) (w~ u))(0) + (M w'' (rZ + r^2 E) u)(0) ]."""
    return -2.0 * _bracket(u, 0, Z, E, cut, quad, 0)


def q1_value(u: RadialProfile, Z: float, E: float, cut: CutoffSet = CutoffSet(),
             quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Q_1 on the channel-1 radial part of u (two brackets, at -1 and at 0)."""
    at_m1 = _bracket(u, 1, Z, E, cut, quad, -1, with_zr=True, shift_terms="r2E")
    at_0 = _bracket(u, 1, Z, E, cut, quad, 0)
    return -2.0 / 3.0 / Z * at_m1 - 2.0 / 3.0 * at_0


# -- generic evaluation of computed functionals --------------------------------

def evaluate_marker(marker: MellinMarker, u: RadialProfile, l: int, Z: float, E: float,
                    cut: CutoffSet = CutoffSet(), quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Numerical value of a (possibly merged) marker on the channel-l profile u."""
    total = 0.0
    pts = cut.breakpoints()
    for coeff, prim in expand_marker(ParamPoly.const(1), marker):
        c = coeff.evaluate(Z, E)
        if prim.source == GI and prim.prefix == PLAIN and prim.cutoff_tag == CUT_V:
            integrand = cut.omega_dd() * u
        elif prim.source == GII and prim.cutoff_tag == CUT_MINUS_ONE:
            vt = cut.omega_tilde.profile() * u
            inner = apply_h0(vt, l) if prim.prefix == OP_H0 else vt
            integrand = cut.omega_dd_minus_one() * inner
        else:
            raise ValueError(f"cannot evaluate marker {prim}")
        total += c * weighted_mellin(integrand, prim.point, quad=quad,
                                     derivative_order=prim.derivative_order, points=pts)
    return total


def evaluate_functional(group: ChannelGroup, u: RadialProfile, Z: float, E: float,
                        cut: CutoffSet = CutoffSet(), quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Q_l(u) from the grouped view of a computed expansion."""
    if not group.ok:
        raise ValueError(f"channel {group.channel} did not factor: {group.failure}")
    total = sum(c.evaluate(Z, E) * evaluate_marker(m, u, group.channel, Z, E, cut, quad)
                for c, m in group.functional)
    return total / Z ** group.q_z_inverse_power


def end_to_end_check(n: int, l: int, Z: float, r_samples: Sequence[float],
                     quad: QuadratureSpec = QuadratureSpec(), K: int = 2,
                     cut: CutoffSet = CutoffSet()) -> float:
    """Max relative deviation of -series_l(r) Q_l(u) from the bound state u at r_samples."""
    if l not in (0, 1):
        raise ValueError("the printed functionals cover channels 0 and 1 only")
    if n < 1 or l >= n:
        raise ValueError(f"need 0 <= l < n, got n={n}, l={l}")
    E = -Z * Z / (2.0 * n * n)
    u = hydrogen_state(n, l, Z)
    q = q0_value(u, Z, E, cut, quad) if l == 0 else q1_value(u, Z, E, cut, quad)
    group = assemble(WeightData(1), l + K, l).group(l)
    worst = 0.0
    for r in r_samples:
        if r <= 0:
            continue
        series = sum(c.evaluate(Z, E) * r ** p for p, c in group.series)
        exact = u(r)
        worst = max(worst, abs(-series * q - exact) / abs(exact))
    return worst
