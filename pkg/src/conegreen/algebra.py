"""Exact arithmetic for Mellin symbols.

Scalars are :class:`fractions.Fraction` (aliased ``Rat``). On top of that:

* :class:`ParamPoly` -- polynomials in the physical parameters Z and E,
* :class:`PolyW` -- polynomials in the Mellin covariable w with ParamPoly
  coefficients,
* :class:`FactoredRationalW` -- ``PolyW / prod (w - q)^m`` with the
  denominator kept as a multiset of rational roots.

Everything is immutable. Denominators are never expanded; poles are read off
the root multiset directly.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

Rat = Fraction
Scalar = Union[int, Fraction]

_SUPERSCRIPTS = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")
MINUS = "−"


class PoleEvaluationError(ArithmeticError):
    """Raised when a rational function is evaluated at one of its poles."""


class InexactDivisionError(ArithmeticError):
    """Synthetic or multivariate division left a nonzero remainder."""


def _sup(n: int) -> str:
    return str(n).translate(_SUPERSCRIPTS)


def _rat_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class ParamPoly:
    """Polynomial in Z and E with exact rational coefficients.

    Stored as a mapping ``(z_degree, e_degree) -> Fraction`` with no zero
    entries, so the zero polynomial is the empty mapping.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Tuple[int, int], Scalar]] = None):
        clean: Dict[Tuple[int, int], Fraction] = {}
        for (zd, ed), c in (terms or {}).items():
            if zd < 0 or ed < 0:
                raise ValueError(f"negative degree in ParamPoly term {(zd, ed)}")
            c = Fraction(c)
            if c:
                clean[(zd, ed)] = c
        self._terms = clean
        self._hash = None

    # -- construction -----------------------------------------------------
    @classmethod
    def const(cls, c: Scalar) -> "ParamPoly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, c: Scalar, z: int = 0, e: int = 0) -> "ParamPoly":
        return cls({(z, e): c})

    @classmethod
    def coerce(cls, x) -> "ParamPoly":
        if isinstance(x, ParamPoly):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to ParamPoly")

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> Dict[Tuple[int, int], Fraction]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=_monomial_order)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self._terms.get((0, 0), Fraction(0))

    def coefficient(self, z: int = 0, e: int = 0) -> Fraction:
        return self._terms.get((z, e), Fraction(0))

    def degree(self) -> int:
        return max((zd + ed for zd, ed in self._terms), default=-1)

    def leading(self) -> Tuple[Tuple[int, int], Fraction]:
        """Leading monomial in lex order (Z before E)."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        key = max(self._terms)
        return key, self._terms[key]

    def content(self) -> Fraction:
        """Positive rational gcd of the coefficients, signed like the display-leading term."""
        if not self._terms:
            return Fraction(0)
        nums = [c.numerator for c in self._terms.values()]
        dens = [c.denominator for c in self._terms.values()]
        g = 0
        for n in nums:
            g = gcd(g, n)
        content = Fraction(g, lcm(*dens))
        lead = self.items()[0][1]
        return content if lead > 0 else -content

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            other = ParamPoly.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return ParamPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = ParamPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return ParamPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ParamPoly({k: c * other for k, c in self._terms.items()})
        if not isinstance(other, ParamPoly):
            return NotImplemented
        out: Dict[Tuple[int, int], Fraction] = {}
        for (z1, e1), c1 in self._terms.items():
            for (z2, e2), c2 in other._terms.items():
                k = (z1 + z2, e1 + e2)
                out[k] = out.get(k, 0) + c1 * c2
        return ParamPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of ParamPoly")
        out = ParamPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("ParamPoly division by zero")
            return ParamPoly({k: c / other for k, c in self._terms.items()})
        if isinstance(other, ParamPoly):
            return self.exact_div(other)
        return NotImplemented

    def exact_div(self, divisor: "ParamPoly") -> "ParamPoly":
        """Exact multivariate division; raises InexactDivisionError on a remainder."""
        if divisor.is_zero():
            raise ZeroDivisionError("ParamPoly division by zero")
        if divisor.is_constant():
            return self / divisor.constant_value()
        (lz, le), lc = divisor.leading()
        rem = self
        quot = ParamPoly()
        while not rem.is_zero():
            (rz, re_), rc = rem.leading()
            if rz < lz or re_ < le:
                raise InexactDivisionError(f"{self} is not divisible by {divisor}")
            step = ParamPoly.monomial(rc / lc, rz - lz, re_ - le)
            quot = quot + step
            rem = rem - step * divisor
        return quot

    def divides(self, other: "ParamPoly") -> bool:
        try:
            other.exact_div(self)
        except InexactDivisionError:
            return False
        return True

    def substitute(self, Z=None, E=None) -> "ParamPoly":
        """Replace Z and/or E by ParamPoly (or scalar) values, exactly."""
        z_val = None if Z is None else ParamPoly.coerce(Z)
        e_val = None if E is None else ParamPoly.coerce(E)
        out = ParamPoly()
        for (zd, ed), c in self._terms.items():
            term = ParamPoly.const(c)
            term = term * (z_val ** zd if z_val is not None else ParamPoly.monomial(1, z=zd))
            term = term * (e_val ** ed if e_val is not None else ParamPoly.monomial(1, e=ed))
            out = out + term
        return out

    def evaluate(self, Z: float, E: float) -> float:
        return float(sum(float(c) * Z ** zd * E ** ed for (zd, ed), c in self._terms.items()))

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ParamPoly.const(other)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # -- display ----------------------------------------------------------
    def __repr__(self):
        return f"ParamPoly({self})"

    def __str__(self):
        return self.to_str()

    def to_str(self) -> str:
        """Expanded form, e.g. ``Z² − 2E``."""
        if not self._terms:
            return "0"
        parts = []
        for i, ((zd, ed), c) in enumerate(self.items()):
            mono = _mono_str(zd, ed)
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"({_rat_str(mag)}){mono}" if mag.denominator != 1 else f"{_rat_str(mag)}{mono}"
            else:
                body = _rat_str(mag)
            if i == 0:
                parts.append(f"{MINUS}{body}" if c < 0 else body)
            else:
                parts.append(f" {MINUS} {body}" if c < 0 else f" + {body}")
        return "".join(parts)

    def factored_str(self) -> str:
        """Content-extracted form, e.g. ``(1/3)(Z² − E)`` or ``−2Z``."""
        if not self._terms:
            return "0"
        content = self.content()
        prim = self / content
        if len(prim._terms) == 1:
            return ParamPoly.monomial(content, *next(iter(prim._terms))).to_str()
        mag = abs(content)
        sign = MINUS if content < 0 else ""
        if mag == 1:
            return f"{sign}({prim.to_str()})"
        if mag.denominator == 1:
            return f"{sign}{mag.numerator}({prim.to_str()})"
        return f"{sign}({_rat_str(mag)})({prim.to_str()})"

    def to_record(self) -> List[dict]:
        """Monomial list with exact rationals as strings (for structured output)."""
        return [
            {"z": zd, "e": ed, "coeff": {"num": str(c.numerator), "den": str(c.denominator)}}
            for (zd, ed), c in self.items()
        ]

    @classmethod
    def from_record(cls, rec: Iterable[dict]) -> "ParamPoly":
        return cls({
            (int(m["z"]), int(m["e"])): Fraction(int(m["coeff"]["num"]), int(m["coeff"]["den"]))
            for m in rec
        })


def _monomial_order(item):
    (zd, ed), _ = item
    return (-(zd + ed), -zd)


def _mono_str(zd: int, ed: int) -> str:
    out = ""
    if zd:
        out += "Z" + (_sup(zd) if zd > 1 else "")
    if ed:
        out += "E" + (_sup(ed) if ed > 1 else "")
    return out


ZERO = ParamPoly()
ONE = ParamPoly.const(1)
Z = ParamPoly.monomial(1, z=1)
E = ParamPoly.monomial(1, e=1)


class PolyW:
    """Polynomial in w; ``coeffs[k]`` multiplies ``w**k``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [ParamPoly.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs: Tuple[ParamPoly, ...] = tuple(cs)

    @classmethod
    def const(cls, c) -> "PolyW":
        return cls([c])

    @classmethod
    def linear(cls, q: Scalar) -> "PolyW":
        """The factor ``w - q``."""
        return cls([-Fraction(q), 1])

    @classmethod
    def from_roots(cls, roots: Mapping[Fraction, int]) -> "PolyW":
        out = cls.const(1)
        for q, m in roots.items():
            for _ in range(m):
                out = out * cls.linear(q)
        return out

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, PolyW) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "PolyW") -> "PolyW":
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyW(
            (self.coeffs[k] if k < len(self.coeffs) else ZERO)
            + (other.coeffs[k] if k < len(other.coeffs) else ZERO)
            for k in range(n)
        )

    def __neg__(self) -> "PolyW":
        return PolyW(-c for c in self.coeffs)

    def __sub__(self, other: "PolyW") -> "PolyW":
        return self + (-other)

    def __mul__(self, other) -> "PolyW":
        if isinstance(other, (int, Fraction, ParamPoly)):
            return PolyW(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return PolyW()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return PolyW(out)

    __rmul__ = __mul__

    def __call__(self, w) -> ParamPoly:
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * w + c
        return acc

    def shift(self, n: Scalar) -> "PolyW":
        """Return ``p(w + n)`` (Taylor shift by repeated synthetic division)."""
        n = Fraction(n)
        if n == 0 or len(self.coeffs) <= 1:
            return self
        cs = list(self.coeffs)
        d = len(cs)
        for i in range(d - 1):
            for k in range(d - 2, i - 1, -1):
                cs[k] = cs[k] + cs[k + 1] * n
        return PolyW(cs)

    def divide_linear(self, q: Scalar) -> Tuple["PolyW", ParamPoly]:
        """Synthetic division by ``w - q``: returns (quotient, remainder)."""
        if not self.coeffs:
            return PolyW(), ZERO
        q = Fraction(q)
        acc = ZERO
        quot = []
        for c in reversed(self.coeffs):
            acc = acc * q + c
            quot.append(acc)
        rem = quot.pop()
        return PolyW(reversed(quot)), rem

    def divmod_monic(self, divisor: "PolyW") -> Tuple["PolyW", "PolyW"]:
        if divisor.is_zero() or divisor.coeffs[-1] != ONE:
            raise ValueError("divisor must be monic")
        rem = list(self.coeffs)
        dd = divisor.degree()
        if len(rem) - 1 < dd:
            return PolyW(), self
        quot = [ZERO] * (len(rem) - dd)
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k]
            if c.is_zero():
                continue
            quot[k - dd] = c
            for j, dc in enumerate(divisor.coeffs):
                rem[k - dd + j] = rem[k - dd + j] - c * dc
        return PolyW(quot), PolyW(rem[:dd])

    def __repr__(self):
        return f"PolyW({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            w = "" if k == 0 else ("w" if k == 1 else f"w{_sup(k)}")
            cs = c.factored_str()
            if not w:
                parts.append(cs)
            elif c == ONE:
                parts.append(w)
            elif c == -ONE:
                parts.append(f"{MINUS}{w}")
            else:
                parts.append(f"{cs}·{w}")
        return " + ".join(parts).replace(f"+ {MINUS}", f"{MINUS} ")


def _normalize_roots(roots) -> Tuple[Tuple[Fraction, int], ...]:
    acc: Dict[Fraction, int] = {}
    for q, m in (roots.items() if isinstance(roots, Mapping) else roots):
        if m < 0:
            raise ValueError("root multiplicity must be positive")
        if m:
            q = Fraction(q)
            acc[q] = acc.get(q, 0) + m
    return tuple(sorted(acc.items()))


class FactoredRationalW:
    """``numerator(w) / prod_q (w - q)^m`` with cancelled common factors.

    The denominator is a sorted tuple of ``(root, multiplicity)`` pairs. After
    construction no denominator root is a root of the numerator (identically
    in Z and E), so structural equality is equality of rational functions.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=()):
        num = num if isinstance(num, PolyW) else PolyW.const(num)
        roots = dict(_normalize_roots(den))
        if num.is_zero():
            roots = {}
        for q in list(roots):
            while roots[q] and num(q).is_zero():
                num, rem = num.divide_linear(q)
                if not rem.is_zero():
                    raise InexactDivisionError(f"corrupt cancellation at w={q}")
                roots[q] -= 1
        self.num = num
        self.den = _normalize_roots(roots)

    # -- construction -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "FactoredRationalW":
        return cls(PolyW.const(c))

    @classmethod
    def zero(cls) -> "FactoredRationalW":
        return cls(PolyW())

    @classmethod
    def one(cls) -> "FactoredRationalW":
        return cls.const(1)

    @classmethod
    def from_poly(cls, p: PolyW) -> "FactoredRationalW":
        return cls(p)

    # -- inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def poles(self) -> List[Tuple[Fraction, int]]:
        return list(self.den)

    def multiplicity(self, q) -> int:
        return dict(self.den).get(Fraction(q), 0)

    def den_degree(self) -> int:
        return sum(m for _, m in self.den)

    def __eq__(self, other):
        if not isinstance(other, FactoredRationalW):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def normalized(self) -> "FactoredRationalW":
        return FactoredRationalW(self.num, self.den)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _as_frw(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        a, b = dict(self.den), dict(other.den)
        common = {q: max(a.get(q, 0), b.get(q, 0)) for q in set(a) | set(b)}
        na = self.num * PolyW.from_roots({q: m - a.get(q, 0) for q, m in common.items()})
        nb = other.num * PolyW.from_roots({q: m - b.get(q, 0) for q, m in common.items()})
        return FactoredRationalW(na + nb, common)

    __radd__ = __add__

    def __neg__(self):
        return FactoredRationalW(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_as_frw(other))

    def __mul__(self, other):
        other = _as_frw(other)
        return FactoredRationalW(self.num * other.num, self.den + other.den)

    __rmul__ = __mul__

    def shift(self, n: Scalar) -> "FactoredRationalW":
        """``f(w + n)``: every root q moves to q - n."""
        n = Fraction(n)
        if n == 0:
            return self
        return FactoredRationalW(self.num.shift(n), tuple((q - n, m) for q, m in self.den))

    def __call__(self, q) -> ParamPoly:
        return eval_at(self, q)

    def __repr__(self):
        return f"FactoredRationalW({self})"

    def __str__(self):
        if self.is_zero():
            return "0"
        num = str(self.num)
        if len([c for c in self.num.coeffs if not c.is_zero()]) > 1 or self.num.degree() > 0:
            if self.den:
                num = f"({num})"
        if not self.den:
            return num
        return f"{num}/({_den_str(self.den)})"


def _den_str(den) -> str:
    parts = []
    for q, m in den:
        if q == 0:
            f = "w"
        elif q > 0:
            f = f"(w{MINUS}{_rat_str(q)})"
        else:
            f = f"(w+{_rat_str(-q)})"
        parts.append(f + (_sup(m) if m > 1 else ""))
    return "".join(parts)


def _as_frw(x) -> FactoredRationalW:
    if isinstance(x, FactoredRationalW):
        return x
    if isinstance(x, PolyW):
        return FactoredRationalW(x)
    return FactoredRationalW.const(x)


def rw_add(a: FactoredRationalW, b: FactoredRationalW) -> FactoredRationalW:
    return a + b


def rw_mul(a: FactoredRationalW, b: FactoredRationalW) -> FactoredRationalW:
    return a * b


def rw_shift(f: FactoredRationalW, n: int) -> FactoredRationalW:
    return f.shift(n)


def eval_at(f: FactoredRationalW, q) -> ParamPoly:
    """Exact value f(q); q must not be a denominator root."""
    q = Fraction(q)
    denom = Fraction(1)
    for root, m in f.den:
        if root == q:
            raise PoleEvaluationError(f"w={q} is a pole of {f}")
        denom *= (q - root) ** m
    return f.num(q) / denom


def _series_inverse_linear(a: Fraction, m: int, order: int) -> List[Fraction]:
    """Taylor coefficients in t of ``(t + a)^(-m)`` up to t^order."""
    # (t+a)^-m = a^-m sum_j binom(-m, j) (t/a)^j
    out = []
    coeff = Fraction(1) / a ** m
    for j in range(order + 1):
        out.append(coeff)
        coeff = coeff * (-(m + j)) / ((j + 1) * a)
    return out


def taylor_regular_part(f: FactoredRationalW, q, order: int) -> List[ParamPoly]:
    """Taylor coefficients g_0..g_order of ``g(t) = (w-q)^m f(w)`` at w = q + t."""
    q = Fraction(q)
    shifted = f.num.shift(q)
    g = [shifted.coeffs[j] if j < len(shifted.coeffs) else ZERO for j in range(order + 1)]
    for root, m in f.den:
        if root == q:
            continue
        inv = _series_inverse_linear(q - root, m, order)
        g = [sum((g[i] * inv[j - i] for i in range(j + 1)), ZERO) for j in range(order + 1)]
    return g


def principal_part(f: FactoredRationalW, q) -> List[Tuple[int, ParamPoly]]:
    """Laurent principal part at q as ``[(k, coeff of (w-q)^-k), ...]``, k = 1..m."""
    m = f.multiplicity(q)
    if m == 0:
        return []
    g = taylor_regular_part(f, q, m - 1)
    return [(k, g[m - k]) for k in range(1, m + 1)]


def polynomial_part(f: FactoredRationalW) -> PolyW:
    quot, _ = f.num.divmod_monic(PolyW.from_roots(dict(f.den)))
    return quot


def from_partial_fractions(poly: PolyW, parts: Mapping[Fraction, List[Tuple[int, ParamPoly]]]) -> FactoredRationalW:
    """Rebuild ``poly + sum_q sum_k c_k / (w-q)^k``."""
    out = FactoredRationalW(poly)
    for q, terms in parts.items():
        for k, c in terms:
            out = out + FactoredRationalW(PolyW.const(c), {q: k})
    return out
