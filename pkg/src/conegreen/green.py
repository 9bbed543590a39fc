"""Residue engine for the Green operator and assembly of its expansion.

Both Green-operator pieces reduce to contour integrals of the form

    (1/2 pi i) \\oint r^{-w} f(w) (M v)(w) dw

around a vertical strip, with f a shifted parametrix coefficient. Each pole
q of f inside the strip contributes ``r^{-q}`` times the residue, multiplied
by a symbolic Mellin value of the input at q (a :class:`MellinMarker`). A
pole of order m additionally produces ``log^j r`` terms and derivatives of
the Mellin transform, from the Laurent expansion of r^{-w}.

G_I uses ``v = omega'' u`` and strips between the lines of weights
gamma-1 and gamma-2 (Z family) or gamma-3 (E family). G_II uses
``(omega'' - 1) v`` with ``v = omega_tilde u`` and the strip between
the lines of weights gamma-1 and gamma_tilde-1, with three families: T^2 hinv_i (acting
after op(h0)), T^1 hinv_i (times Z) and hinv_i (times E).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import (
    E,
    ONE,
    ZERO,
    FactoredRationalW,
    InexactDivisionError,
    ParamPoly,
    Z,
    principal_part,
)
from .channels import Channel, WeightData, check_admissibility
from .parametrix import parametrix_coefficient

GI, GII = "GI", "GII"
CUT_V = "omega_doubleprime_v"
CUT_MINUS_ONE = "omega_doubleprime_minus_one_v"

PLAIN = "plain"
OP_H0 = "op_h0"
MUL_RZ = "multiply_rZ"
MUL_R2E = "multiply_r2E"
OP_H0_PLUS_ZR = "op_h0_plus_Zr"
MUL_RZ_PLUS_R2E = "multiply_rZ_plus_r2E"
OP_H = "op_h0_plus_Zr_plus_r2E"

PREFIX_ORDER = (PLAIN, OP_H0, MUL_RZ, MUL_R2E, OP_H0_PLUS_ZR, MUL_RZ_PLUS_R2E, OP_H)

# family -> (prefactor, canonical prefix, Mellin shift absorbed)
FAMILY_H0, FAMILY_Z, FAMILY_E = "h0", "Z", "E"
_FAMILY_CANON = {FAMILY_Z: (Z, MUL_RZ, 1), FAMILY_E: (E, MUL_R2E, 2)}

# merged prefix -> its components as (prefix, extra point shift, coefficient factor)
_EXPANSIONS = {
    PLAIN: ((PLAIN, 0, ONE),),
    OP_H0: ((OP_H0, 0, ONE),),
    MUL_RZ: ((PLAIN, 1, Z),),
    MUL_R2E: ((PLAIN, 2, E),),
    OP_H0_PLUS_ZR: ((OP_H0, 0, ONE), (PLAIN, 1, Z)),
    MUL_RZ_PLUS_R2E: ((PLAIN, 1, Z), (PLAIN, 2, E)),
    OP_H: ((OP_H0, 0, ONE), (PLAIN, 1, Z), (PLAIN, 2, E)),
}

# merge rules tried in order: (source, components, merged prefix)
_MERGES = (
    (GII, (OP_H0, MUL_RZ, MUL_R2E), OP_H),
    (GII, (OP_H0, MUL_RZ), OP_H0_PLUS_ZR),
    (GI, (MUL_RZ, MUL_R2E), MUL_RZ_PLUS_R2E),
)


class PoleOnContourError(ValueError):
    """A pole lies on one of the integration lines; shift the weight."""


@dataclass(frozen=True)
class MellinMarker:
    """Symbolic Mellin value such as ``(M (omega''-1) op(h0) v)(w0)``."""

    source: str
    prefix: str
    cutoff_tag: str
    point: int
    derivative_order: int = 0

    def at(self, point: int, derivative_order: int = 0) -> "MellinMarker":
        return replace(self, point=point, derivative_order=derivative_order)

    def sort_key(self):
        return (self.point, PREFIX_ORDER.index(self.prefix), self.source, self.derivative_order)

    def describe(self) -> str:
        inner = {
            PLAIN: "",
            OP_H0: "op(h0)",
            MUL_RZ: "rZ·",
            MUL_R2E: "r²E·",
            OP_H0_PLUS_ZR: "op(h0+Zr)",
            MUL_RZ_PLUS_R2E: "(rZ+r²E)·",
            OP_H: "op(h0+Zr+r²E)",
        }[self.prefix]
        if self.cutoff_tag == CUT_V:
            body = f"ω''{inner}u"
        else:
            body = f"(ω''−1){inner}(ω̃u)" if inner.startswith("op") else f"(ω''−1){inner}ω̃u"
        d = "'" * self.derivative_order if self.derivative_order <= 3 else f"^({self.derivative_order})"
        pt = str(self.point).replace("-", "−")
        return f"(M {body}){d}({pt})"

    def to_record(self) -> dict:
        return {
            "source": self.source,
            "prefix": self.prefix,
            "cutoff_tag": self.cutoff_tag,
            "point": self.point,
            "derivative_order": self.derivative_order,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "MellinMarker":
        return cls(rec["source"], rec["prefix"], rec["cutoff_tag"], int(rec["point"]),
                   int(rec["derivative_order"]))


GI_MARKER = MellinMarker(GI, PLAIN, CUT_V, 0)
GII_OP_H0_MARKER = MellinMarker(GII, OP_H0, CUT_MINUS_ONE, 0)
GII_PLAIN_MARKER = MellinMarker(GII, PLAIN, CUT_MINUS_ONE, 0)


@dataclass(frozen=True)
class AsymptoticTerm:
    """``coeff * r^r_power * log^log_power r * P_channel * marker``.

    ``family`` and ``order`` record which piece of G produced the term
    (prefactor family h0/Z/E and parametrix order i).
    """

    channel: int
    r_power: int
    log_power: int
    coeff: ParamPoly
    marker: MellinMarker
    family: str = FAMILY_H0
    order: int = 0

    def sort_key(self):
        return (self.channel, self.r_power, self.log_power) + self.marker.sort_key() + (
            self.family, self.order)

    def to_record(self) -> dict:
        return {
            "channel": self.channel,
            "r_power": self.r_power,
            "log_power": self.log_power,
            "coefficient": self.coeff.to_record(),
            "marker": self.marker.to_record(),
            "family": self.family,
            "order": self.order,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "AsymptoticTerm":
        return cls(
            int(rec["channel"]), int(rec["r_power"]), int(rec["log_power"]),
            ParamPoly.from_record(rec["coefficient"]), MellinMarker.from_record(rec["marker"]),
            rec.get("family", FAMILY_H0), int(rec.get("order", 0)),
        )


@dataclass(frozen=True)
class Strip:
    """Open strip ``left < Re w < right``; orientation +1 is counterclockwise."""

    left: Fraction
    right: Fraction
    orientation: int = 1

    def __post_init__(self):
        object.__setattr__(self, "left", Fraction(self.left))
        object.__setattr__(self, "right", Fraction(self.right))
        if self.left > self.right:
            raise ValueError("strip requires left <= right")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @classmethod
    def between_weights(cls, beta_a, beta_b, orientation: int = 1) -> "Strip":
        """Strip between the Mellin lines Re w = 1/2 - beta of two weights."""
        a = Fraction(1, 2) - Fraction(beta_a)
        b = Fraction(1, 2) - Fraction(beta_b)
        return cls(min(a, b), max(a, b), orientation)

    def flipped(self) -> "Strip":
        return Strip(self.left, self.right, -self.orientation)


def poles_in_strip(f: FactoredRationalW, s: Strip) -> List[Tuple[Fraction, int]]:
    out = []
    for q, m in f.poles():
        if q == s.left or q == s.right:
            raise PoleOnContourError(f"pole w={q} of {f} lies on the contour Re w={q}")
        if s.left < q < s.right:
            out.append((q, m))
    return out


def contour_terms(
    f: FactoredRationalW,
    s: Strip,
    r_offset: int,
    marker_base: MellinMarker,
    l,
    prefactor: ParamPoly = ONE,
    family: str = FAMILY_H0,
    order: int = 0,
) -> List[AsymptoticTerm]:
    """Residues of ``prefactor * r^r_offset * r^{-w} f(w) (M v)(w)`` in the strip.

    With the Laurent data ``f = sum_k a_k (w-q)^{-k}``, ``r^{-w} = r^{-q}
    sum_j (-log r)^j (w-q)^j / j!`` and ``(M v)(w) = sum_d (M v)^{(d)}(q)
    (w-q)^d / d!``, the residue at q collects ``j + d = k - 1``.
    """
    l = l.l if isinstance(l, Channel) else int(l)
    prefactor = ParamPoly.coerce(prefactor)
    terms = []
    for q, _ in poles_in_strip(f, s):
        if q.denominator != 1:
            raise ValueError(f"non-integral pole {q}: markers are indexed by integer points")
        q = int(q)
        acc: Dict[Tuple[int, int], ParamPoly] = {}
        for k, a_k in principal_part(f, q):
            for j in range(k):
                d = k - 1 - j
                c = a_k * Fraction((-1) ** j, factorial(j) * factorial(d))
                acc[(j, d)] = acc.get((j, d), ZERO) + c
        for (j, d), c in acc.items():
            c = c * prefactor * s.orientation
            if c.is_zero():
                continue
            terms.append(AsymptoticTerm(l, r_offset - q, j, c, marker_base.at(q, d), family, order))
    return sorted(terms, key=AsymptoticTerm.sort_key)


def _gi_strips(gamma: Fraction) -> Tuple[Strip, Strip]:
    return (Strip.between_weights(gamma - 1, gamma - 2), Strip.between_weights(gamma - 1, gamma - 3))


def gi_terms(weights: WeightData, N: int, L: int) -> List[AsymptoticTerm]:
    """All G_I contributions for parametrix orders 0..N and channels 0..L."""
    _require_window(weights)
    z_strip, e_strip = _gi_strips(weights.gamma)
    out = []
    for i in range(N + 1):
        for l in range(L + 1):
            h = parametrix_coefficient(l, i)
            out += contour_terms(h.shift(1), z_strip, i + 1, GI_MARKER, l, Z, FAMILY_Z, i)
            out += contour_terms(h, e_strip, i + 2, GI_MARKER, l, E, FAMILY_E, i)
    return sorted(out, key=AsymptoticTerm.sort_key)


def default_gamma_tilde(N: int, L: int) -> Fraction:
    return Fraction(3, 2) + L + N + 2


def gii_strip(weights: WeightData, gamma_tilde) -> Strip:
    # lines of M_{gamma-1} and M_{gamma_tilde-1}
    return Strip.between_weights(weights.gamma - 1, Fraction(gamma_tilde) - 1)


def gii_terms(weights: WeightData, gamma_tilde, N: int, L: int) -> List[AsymptoticTerm]:
    """All G_II contributions for parametrix orders 0..N and channels 0..L."""
    _require_window(weights)
    gamma_tilde = Fraction(gamma_tilde)
    if gamma_tilde <= weights.gamma:
        raise ValueError("gamma_tilde must exceed gamma")
    strip = gii_strip(weights, gamma_tilde)
    out = []
    for i in range(N + 1):
        for l in range(L + 1):
            h = parametrix_coefficient(l, i)
            families = (
                (h.shift(2), i, GII_OP_H0_MARKER, ONE, FAMILY_H0),
                (h.shift(1), i + 1, GII_PLAIN_MARKER, Z, FAMILY_Z),
                (h, i + 2, GII_PLAIN_MARKER, E, FAMILY_E),
            )
            for f, offset, marker, pref, fam in families:
                low = [q for q, _ in f.poles() if q < strip.left]
                if low:
                    raise ValueError(
                        f"gamma_tilde={gamma_tilde} too small: poles {low} of channel {l}, order {i} "
                        f"lie left of Re w={strip.left}")
                out += contour_terms(f, strip, offset, marker, l, pref, fam, i)
    return sorted(out, key=AsymptoticTerm.sort_key)


def strip_poles(weights: WeightData, N: int, L: int, gamma_tilde=None) -> List[Tuple[str, str, int, int, Fraction, int]]:
    """Every pole picked up by the G_I and G_II contours.

    Rows are ``(source, family, channel, order, pole, multiplicity)``.
    """
    gamma_tilde = Fraction(default_gamma_tilde(N, L) if gamma_tilde is None else gamma_tilde)
    z_strip, e_strip = _gi_strips(weights.gamma)
    ii = gii_strip(weights, gamma_tilde)
    rows = []
    for i in range(N + 1):
        for l in range(L + 1):
            h = parametrix_coefficient(l, i)
            plan = ((GI, FAMILY_Z, h.shift(1), z_strip), (GI, FAMILY_E, h, e_strip),
                    (GII, FAMILY_H0, h.shift(2), ii), (GII, FAMILY_Z, h.shift(1), ii),
                    (GII, FAMILY_E, h, ii))
            for src, fam, f, s in plan:
                rows += [(src, fam, l, i, q, m) for q, m in poles_in_strip(f, s)]
    return rows


def channel_cutoff_warnings(N: int, L: int) -> List[str]:
    # channel l first contributes at r^l
    if L + 1 <= N:
        return [f"channel cutoff L={L}: channels {L + 1}..{N} contribute at r-orders <= {N} "
                "and are truncated"]
    return []


def _require_window(weights: WeightData):
    rep = check_admissibility(weights)
    if not rep.ok:
        raise ValueError("; ".join(rep.messages))


# -- canonical markers -------------------------------------------------------

def canonicalize_marker(t: AsymptoticTerm) -> AsymptoticTerm:
    """Absorb the Z or E prefactor into the marker via (M r^k v)(w) = (M v)(w+k).

    ``Z (M v)(q)`` becomes ``(M rZ v)(q-1)`` and ``E (M v)(q)`` becomes
    ``(M r^2 E v)(q-2)``; the prefactor is divided out of the coefficient.
    Terms of the op(h0) family and already-canonical markers are unchanged.
    """
    if t.marker.prefix != PLAIN or t.family not in _FAMILY_CANON:
        return t
    pref, prefix, shift = _FAMILY_CANON[t.family]
    coeff = t.coeff.exact_div(pref)
    marker = replace(t.marker, prefix=prefix, point=t.marker.point - shift)
    return replace(t, coeff=coeff, marker=marker)


def merge_markers(combo: Dict[MellinMarker, ParamPoly]) -> List[Tuple[ParamPoly, MellinMarker]]:
    """Group canonical markers sharing a point into the named sums.

    For example ``c (M rZ v)(0) + c (M r^2E v)(0)`` becomes
    ``c (M (rZ + r^2E) v)(0)``. Only equal coefficients are merged.
    """
    remaining = {m: c for m, c in combo.items() if not c.is_zero()}
    out = []
    for source, parts, merged in _MERGES:
        for m in sorted(remaining, key=MellinMarker.sort_key):
            if m not in remaining or m.source != source or m.prefix != parts[0]:
                continue
            siblings = [replace(m, prefix=p) for p in parts]
            if all(s in remaining for s in siblings):
                c = remaining[m]
                if all(remaining[s] == c for s in siblings):
                    for s in siblings:
                        del remaining[s]
                    out.append((c, replace(m, prefix=merged)))
    out += [(c, m) for m, c in remaining.items()]
    return sorted(out, key=lambda cm: cm[1].sort_key())


def expand_marker(coeff: ParamPoly, marker: MellinMarker) -> List[Tuple[ParamPoly, MellinMarker]]:
    """Inverse of canonicalization: rewrite in plain/op_h0 markers with Z, E factors."""
    return [
        (coeff * factor, replace(marker, prefix=p, point=marker.point + shift))
        for p, shift, factor in _EXPANSIONS[marker.prefix]
    ]


def expand_combination(pairs: Sequence[Tuple[ParamPoly, MellinMarker]]) -> Dict[MellinMarker, ParamPoly]:
    acc: Dict[MellinMarker, ParamPoly] = {}
    for c, m in pairs:
        for c2, m2 in expand_marker(c, m):
            acc[m2] = acc.get(m2, ZERO) + c2
    return {m: c for m, c in acc.items() if not c.is_zero()}


# -- assembly ----------------------------------------------------------------

@dataclass(frozen=True)
class ChannelGroup:
    """``series(r) * Q_l`` view of one channel.

    ``series`` lists ``(r_power, coefficient)`` with the leading coefficient
    normalized to Z^l (1 for l=0, Z for l=1). The functional is
    ``Q_l = Z^{-q_z_inverse_power} * sum coeff * marker`` over the canonical,
    unmerged markers in ``functional``.
    """

    channel: int
    ok: bool
    series: Tuple[Tuple[int, ParamPoly], ...] = ()
    functional: Tuple[Tuple[ParamPoly, MellinMarker], ...] = ()
    q_z_inverse_power: int = 0
    failure: Optional[str] = None
    failure_order: Optional[int] = None

    def merged_functional(self) -> List[Tuple[ParamPoly, MellinMarker]]:
        return merge_markers({m: c for c, m in self.functional})

    def series_coefficients(self) -> List[ParamPoly]:
        """Coefficients c_k of r^{l+k}, k = 0.."""
        return [c for _, c in self.series]


@dataclass(frozen=True)
class GreenExpansion:
    terms: Tuple[AsymptoticTerm, ...]
    order: int
    channel_cutoff: int
    weight: WeightData
    gamma_tilde: Fraction
    groups: Tuple[ChannelGroup, ...] = ()
    warnings: Tuple[str, ...] = ()

    def group(self, l: int) -> ChannelGroup:
        for g in self.groups:
            if g.channel == l:
                return g
        raise KeyError(f"no grouped view for channel {l}")

    def channel_terms(self, l: int) -> List[AsymptoticTerm]:
        return [t for t in self.terms if t.channel == l]

    @property
    def log_free(self) -> bool:
        return all(t.log_power == 0 for t in self.terms)


def factor_channel(terms: Sequence[AsymptoticTerm], l: int, order: int) -> ChannelGroup:
    """Try to write the channel-l terms with r-power <= order as series(r) x Q_l.

    Succeeds iff the matrix (r-power, log-power) x canonical marker has rank
    one; otherwise reports the first offending r-order.
    """
    rows: Dict[Tuple[int, int], Dict[MellinMarker, ParamPoly]] = {}
    for t in terms:
        if t.channel != l or t.r_power > order:
            continue
        c = canonicalize_marker(t)
        row = rows.setdefault((c.r_power, c.log_power), {})
        row[c.marker] = row.get(c.marker, ZERO) + c.coeff
    rows = {k: {m: c for m, c in row.items() if not c.is_zero()} for k, row in rows.items()}
    rows = {k: row for k, row in rows.items() if row}
    lead_key = (l, 0)
    if lead_key not in rows:
        return ChannelGroup(l, False, failure=f"no r^{l} row for channel {l}", failure_order=l)
    lead = rows[lead_key]
    pivot = next((m for m in sorted(lead, key=MellinMarker.sort_key) if lead[m].is_constant()),
                 min(lead, key=MellinMarker.sort_key))
    norm = Z ** l
    series = []
    for key in sorted(rows):
        r_power, log_power = key
        row = rows[key]
        if log_power:
            return ChannelGroup(l, False, failure=f"log term at r^{r_power}", failure_order=r_power)
        try:
            ratio = row.get(pivot, ZERO).exact_div(lead[pivot])
        except InexactDivisionError:
            return ChannelGroup(l, False, failure=f"non-polynomial ratio at r^{r_power}",
                                failure_order=r_power)
        for m in set(row) | set(lead):
            if row.get(m, ZERO) != ratio * lead.get(m, ZERO):
                return ChannelGroup(l, False, failure=f"rank > 1 at r^{r_power}",
                                    failure_order=r_power)
        series.append((r_power, ratio * norm))
    # fill r-powers with vanishing rows
    present = dict(series)
    series = tuple((p, present.get(p, ZERO)) for p in range(l, order + 1))
    functional = tuple((lead[m], m) for m in sorted(lead, key=MellinMarker.sort_key))
    return ChannelGroup(l, True, series, functional, q_z_inverse_power=l)


def assemble(weights: WeightData, N: int, L: int, gamma_tilde=None) -> GreenExpansion:
    """Raw G_I + G_II term table plus the per-channel grouped view."""
    if N < 0 or L < 0:
        raise ValueError("order and channel cutoff must be non-negative")
    if gamma_tilde is None:
        gamma_tilde = weights.gamma_tilde if weights.gamma_tilde is not None else default_gamma_tilde(N, L)
    gamma_tilde = Fraction(gamma_tilde)
    terms = _combine(gi_terms(weights, N, L) + gii_terms(weights, gamma_tilde, N, L))
    groups = tuple(factor_channel(terms, l, N) for l in range(min(L, N) + 1))
    return GreenExpansion(tuple(terms), N, L, weights, gamma_tilde, groups,
                          tuple(channel_cutoff_warnings(N, L)))


def _combine(terms: List[AsymptoticTerm]) -> List[AsymptoticTerm]:
    return sorted(terms, key=AsymptoticTerm.sort_key)


def energy_level(n: int) -> ParamPoly:
    """E_n = -Z^2 / (2 n^2)."""
    if n < 1:
        raise ValueError("principal quantum number must be positive")
    return ParamPoly.monomial(Fraction(-1, 2 * n * n), z=2)


def specialize_energy(g: GreenExpansion, n: int) -> GreenExpansion:
    """Substitute E = -Z^2/(2n^2) into every coefficient, exactly."""
    e_n = energy_level(n)

    def sub(p: ParamPoly) -> ParamPoly:
        return p.substitute(E=e_n)

    terms = tuple(replace(t, coeff=sub(t.coeff)) for t in g.terms)
    terms = tuple(t for t in terms if not t.coeff.is_zero())
    groups = tuple(
        replace(gr, series=tuple((p, sub(c)) for p, c in gr.series),
                functional=tuple((sub(c), m) for c, m in gr.functional))
        for gr in g.groups
    )
    return replace(g, terms=terms, groups=groups)


def substitute_parameters(g: GreenExpansion, Z_value=None, E_value=None) -> GreenExpansion:
    """Substitute rational values for Z and/or E in all coefficients."""

    def sub(p: ParamPoly) -> ParamPoly:
        return p.substitute(Z=Z_value, E=E_value)

    terms = tuple(t2 for t2 in (replace(t, coeff=sub(t.coeff)) for t in g.terms)
                  if not t2.coeff.is_zero())
    groups = tuple(
        replace(gr, series=tuple((p, sub(c)) for p, c in gr.series),
                functional=tuple((sub(c), m) for c, m in gr.functional))
        for gr in g.groups
    )
    return replace(g, terms=terms, groups=groups)
