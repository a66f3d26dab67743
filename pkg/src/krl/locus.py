"""Slope calculus on the pillowcase: good arcs, lens lines, branched covers.

Coordinates are (mu*, lambda*) = (x, y) on the universal cover of the
pillowcase; reducibles sit on y = 0 at x = alpha/pi for alpha in A_K, and
parabolics at lattice points.  A line of slope -a through a point meeting an
arc in its interior puts the slope a into S_tSLR(K).  Arcs are inputs; this
module only turns them into exact sets of rational slopes.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from flint import arb, ctx

from .errors import (BothHeightsZero, ConstantSignature, ParityViolation, ZeroHeightArc,
                     ZeroSignature)
from .poly import AlgebraicReal, as_laurent, normalize_symmetric
from .signatures import (SignatureStep, arb_bounds, compare_two_cos_pi, d_k,
                         partition_and_width)

INF = math.inf


def _q(x):
    if x in (INF, -INF):
        return x
    return Fraction(x)


def _fmt(x):
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return str(x)


# ---------------------------------------------------------------------------
# slope sets

@dataclass(frozen=True)
class SlopeSet:
    """A set of slopes in Q u {inf}.

    Union of open intervals (endpoints rational or +-inf), minus either a
    finite set of points or the family {y/n : n != 0} when ``excluded_family``
    is y.  The slope 0 always belongs.  ``infinity`` marks whether inf is in.
    """

    intervals: tuple = ()
    excluded_points: frozenset = frozenset()
    excluded_family: Optional[Fraction] = None
    infinity: bool = False
    label: str = ""

    def __post_init__(self):
        iv = []
        for lo, hi in self.intervals:
            lo, hi = _q(lo), _q(hi)
            if not lo < hi:
                raise ValueError(f"empty interval ({lo}, {hi})")
            iv.append((lo, hi))
        object.__setattr__(self, "intervals", tuple(sorted(iv)))
        object.__setattr__(self, "excluded_points", frozenset(Fraction(x) for x in self.excluded_points))
        if self.excluded_family is not None:
            object.__setattr__(self, "excluded_family", Fraction(self.excluded_family))

    def _in_family(self, r: Fraction) -> bool:
        y = self.excluded_family
        if y is None or r == 0:
            return False
        n = y / r
        return n.denominator == 1

    def __contains__(self, r) -> bool:
        if r == INF or r == "inf":
            return self.infinity
        r = Fraction(r)
        if r == 0:
            return True
        if r in self.excluded_points or self._in_family(r):
            return False
        return any(lo < r < hi for lo, hi in self.intervals)

    def contains(self, r) -> bool:
        return r in self

    def is_trivial(self) -> bool:
        """Only the slope 0."""
        return not self.intervals and not self.infinity

    def to_json(self):
        return {"intervals": [[_fmt(a), _fmt(b)] for a, b in self.intervals],
                "excluded_points": sorted(str(x) for x in self.excluded_points),
                "excluded_family": None if self.excluded_family is None else f"{self.excluded_family}/n",
                "infinity": self.infinity, "label": self.label}

    def __str__(self):
        if self.is_trivial():
            return "{0}"
        parts = [f"({_fmt(a)}, {_fmt(b)})" for a, b in self.intervals]
        s = " u ".join(parts)
        if self.excluded_family is not None:
            s += f" \\ {{{self.excluded_family}/n}}"
        if self.excluded_points:
            s += " \\ {" + ", ".join(sorted(map(str, self.excluded_points))) + "}"
        return s


TRIVIAL = SlopeSet(label="trivial")
ALL_RATIONALS = SlopeSet(((-INF, INF),), label="Q")


def interval(lo, hi, label="") -> SlopeSet:
    return SlopeSet(((lo, hi),), label=label)


@dataclass(frozen=True)
class Disjunction:
    """One of ``options`` is contained in the slope set; which one is not determined."""

    options: tuple
    note: str = ""

    def certain(self):
        """Slopes lying in every option."""
        return [o for o in self.options]

    def contains_in_all(self, r) -> bool:
        return all(r in o for o in self.options)

    def to_json(self):
        return {"either": [o.to_json() for o in self.options], "note": self.note}


# ---------------------------------------------------------------------------
# good arcs

@dataclass(frozen=True)
class ArcA:
    """Good arc of type A_k: from a parabolic at height k to a reducible.

    ``side`` is the sign of x when the arc is translated so that the
    parabolic sits at (0, k) and the reducible at (x, 0).  ``mirror`` reflects
    the picture across the vertical axis (x -> -x), reversing the side.
    """

    k: int
    side: int
    mirror: bool = False

    def __post_init__(self):
        if self.side not in (1, -1):
            raise ValueError("side must be +1 or -1")

    @classmethod
    def from_endpoints(cls, parabolic, reducible_x, mirror=False) -> "ArcA":
        px, k = parabolic
        dx = Fraction(reducible_x) - Fraction(px) if not isinstance(reducible_x, float) \
            else reducible_x - px
        if dx == 0:
            raise ValueError("reducible cannot lie below the parabolic (+-2 not in D_K)")
        return cls(int(k), 1 if dx > 0 else -1, mirror)


@dataclass(frozen=True)
class ArcB:
    """Good arc of type B between two parabolics p1 != p2."""

    p1: tuple
    p2: tuple

    def __post_init__(self):
        p1 = tuple(int(v) for v in self.p1)
        p2 = tuple(int(v) for v in self.p2)
        if p1 == p2:
            raise ValueError("endpoints of a type B arc must differ")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)


@dataclass(frozen=True)
class ArcResult:
    slopes: SlopeSet
    branch: str
    sharp: Optional[SlopeSet] = None

    def to_json(self):
        out = {"slopes": self.slopes.to_json(), "branch": self.branch}
        if self.sharp is not None:
            out["sharp"] = self.sharp.to_json()
        return out


def type_a_interval(arc: ArcA, strict: bool = True) -> ArcResult:
    """Slopes forced by a good arc of type A_k, k != 0.

    After rotating about the origin we may take k > 0; then x > 0 gives
    (-inf, k) and x < 0 gives (-k, inf).
    """
    if arc.k == 0:
        if strict:
            raise ZeroHeightArc("an A_0 arc gives no interval")
        warnings.warn("A_0 arc: no interval")
        return ArcResult(TRIVIAL, "A_0")
    s = arc.side * (1 if arc.k > 0 else -1) * (-1 if arc.mirror else 1)
    k = abs(arc.k)
    if s > 0:
        return ArcResult(interval(-INF, k, f"A_{arc.k}"), "left")
    return ArcResult(interval(-k, INF, f"A_{arc.k}"), "right")


def type_b_interval(arc: ArcB) -> ArcResult:
    (x1, y1), (x2, y2) = arc.p1, arc.p2
    if y1 == 0 and y2 == 0:
        raise BothHeightsZero("type B arc needs a nonzero height")
    if y1 == y2:
        S = SlopeSet(((-INF, INF),), excluded_family=abs(y1), label="B flat")
        return ArcResult(S, "flat")
    if x1 == x2:
        if y1 * y2 < 0:
            return ArcResult(SlopeSet(((-INF, INF),), label="B vertical, opposite heights"), "vertical_all")
        return ArcResult(interval(-1, 1, "B vertical"), "vertical")
    if abs(x2 - x1) != 1:
        raise ValueError("endpoints of a good arc lie in adjacent columns")
    if x1 > x2:
        (x1, y1), (x2, y2) = (x2, y2), (x1, y1)
    flip = False
    if y2 < y1:
        # reflect across the vertical axis: slopes change sign
        y1, y2 = y2, y1
        flip = True
    if y2 < 0:
        # rotate about (1/2, 0): slopes are preserved
        y1, y2 = -y2, -y1
    if y1 >= 0:
        bound = Fraction(y2 - y1, 2)
    else:
        bound = Fraction(max(-y1, y2))
    half = Fraction(1, 2)
    if flip:
        sharp, clamped, br = interval(-INF, bound, "B sharp"), interval(-INF, half, "B"), "left"
    else:
        sharp, clamped, br = interval(-bound, INF, "B sharp"), interval(-half, INF, "B"), "right"
    return ArcResult(clamped, br, sharp)


# ---------------------------------------------------------------------------
# branched covers

def _pi_over(w: Fraction, upper: bool, prec: int = 128) -> Fraction:
    old = ctx.prec
    ctx.prec = prec
    try:
        lo, hi = arb_bounds(arb.pi() / arb(w.numerator) * arb(w.denominator))
    finally:
        ctx.prec = old
    return hi if upper else lo


def branched_threshold(sf: SignatureStep) -> int:
    """ceil(pi / w_K); every n > pi / w_K is covered.

    With exact alpha/pi breakpoints the value is exact; otherwise pi is
    divided by the certified lower bound for w_K, which can only raise it.
    """
    if sf.is_constant():
        raise ConstantSignature("signature function is constant")
    P = partition_and_width(sf)
    if P.w_over_pi is not None:
        x = 1 / P.w_over_pi
        return math.ceil(x)
    return math.ceil(_pi_over(P.w_lower, upper=True))


def first_certified_n(sf: SignatureStep) -> int:
    """Smallest n with n > pi / w_K (certified)."""
    if sf.is_constant():
        raise ConstantSignature("signature function is constant")
    P = partition_and_width(sf)
    if P.w_over_pi is not None:
        return math.floor(1 / P.w_over_pi) + 1
    return math.floor(_pi_over(P.w_lower, upper=True)) + 1


def interval_of_pi_multiple(sf: SignatureStep, r: Fraction) -> Optional[int]:
    """Index of the open partition interval containing alpha = pi r, None on a breakpoint."""
    r = Fraction(r)
    if not 0 < r < 1:
        raise ValueError("need 0 < r < 1")
    i = 0
    for j in sf.jumps:
        if j.alpha_over_pi is not None:
            s = (j.alpha_over_pi > r) - (j.alpha_over_pi < r)
            # jumps are sorted by increasing alpha, so c - 2cos(pi r) has sign -(alpha_j - r)
            s = -s
        else:
            s = compare_two_cos_pi(j.c, r)
        if s == 0:
            return None
        if s < 0:
            break
        i += 1
    return i


@dataclass(frozen=True)
class BranchedWitness:
    n: int
    k: int
    interval: int
    h_slr: int


def branched_refined(sf: SignatureStep, h: int, n_max: int, witnesses: bool = False):
    """n <= n_max with some alpha = k pi / n in an open interval where h + sigma/2 != 0."""
    found, wit = set(), {}
    if sf.is_constant() and h + sf.values[0] // 2 == 0:
        return (found, wit) if witnesses else found
    for n in range(2, n_max + 1):
        for k in range(1, n):
            i = interval_of_pi_multiple(sf, Fraction(k, n))
            if i is None:
                continue
            v = h + sf.values[i] // 2
            if v != 0:
                found.add(n)
                wit[n] = BranchedWitness(n, k, i, v)
                break
    return (found, wit) if witnesses else found


# ---------------------------------------------------------------------------
# lens lines

@dataclass(frozen=True)
class LensLine:
    """The line of slope -alpha through (n/p, 0)."""

    p: int
    n: int
    alpha: Fraction

    @property
    def slope(self) -> Fraction:
        return -self.alpha

    @property
    def x0(self) -> Fraction:
        return Fraction(self.n, self.p)

    def y_at(self, x) -> Fraction:
        return self.slope * (Fraction(x) - self.x0)

    def on_line(self, pt) -> bool:
        x, y = Fraction(pt[0]), Fraction(pt[1])
        return y == self.y_at(x)

    def in_open_part(self, pt) -> bool:
        """On the line, not a lattice point and not (n/p, 0)."""
        x, y = Fraction(pt[0]), Fraction(pt[1])
        if not self.on_line((x, y)):
            return False
        if x.denominator == 1 and y.denominator == 1:
            return False
        return not (x == self.x0 and y == 0)

    def segment(self, x_lo=0, x_hi=1):
        return [(Fraction(x), self.y_at(x)) for x in (x_lo, x_hi)]


def lens_line(p: int, n: int, alpha_slope) -> LensLine:
    if p <= 0:
        raise ValueError("p must be positive")
    return LensLine(int(p), int(n), Fraction(alpha_slope))


def arc_violations(path: Sequence, p: int, alpha, n_range: Iterable[int]) -> list:
    """Lens lines L_{alpha,n} whose open part contains an interior vertex of ``path``."""
    out = []
    inner = list(path)[1:-1]
    for n in n_range:
        L = lens_line(p, n, alpha)
        if any(L.in_open_part(pt) for pt in inner):
            out.append(n)
    return out


@dataclass
class LensSubinterval:
    n: int
    roots: int                 # elements of A_K in [(n-1)/p, n/p] counted with multiplicity
    on_endpoint: bool
    qualifies: bool
    candidates: tuple          # heights (n-1, n, n-1-p, n-p)
    root_alpha_over_pi: Optional[float] = None

    def to_json(self):
        return {"n": self.n, "roots": self.roots, "on_endpoint": self.on_endpoint,
                "qualifies": self.qualifies, "candidates": list(self.candidates),
                "root_alpha_over_pi": self.root_alpha_over_pi}


@dataclass
class LensReport:
    p: int
    subintervals: list
    slopes: SlopeSet

    @property
    def qualifying(self):
        return [s.n for s in self.subintervals if s.qualifies]

    def to_json(self):
        return {"p": self.p, "qualifying": self.qualifying,
                "subintervals": [s.to_json() for s in self.subintervals],
                "slopes": self.slopes.to_json()}


def lens_arc_analysis(delta, p: int) -> LensReport:
    """Locate roots of Delta(e^{2 pi i x}) against the subintervals [(n-1)/p, n/p]."""
    if p <= 0:
        raise ValueError("p must be positive")
    d = normalize_symmetric(as_laurent(delta))
    D = d_k(d)
    subs = []
    for n in range(1, p + 1):
        a, b = Fraction(n - 1, p), Fraction(n, p)
        count, end, where = 0, False, None
        for c, m in D.elements:
            # alpha in [a, b] iff 2cos(pi b) <= c <= 2cos(pi a)
            s_hi = compare_two_cos_pi(c, a, d) if a > 0 else -1
            s_lo = compare_two_cos_pi(c, b, d) if b < 1 else 1
            if s_hi == 0 or s_lo == 0:
                end = True
                count += m
            elif s_hi < 0 and s_lo > 0:
                count += m
                where = math.acos(float(c) / 2) / math.pi
        ok = count == 1 and not end
        subs.append(LensSubinterval(n, count, end, ok, (n - 1, n, n - 1 - p, n - p),
                                    where if ok else None))
    good = [s.n for s in subs if s.qualifies and s.n not in (1, p)]
    S = interval(-INF, 1, f"lens p={p}") if good else TRIVIAL
    return LensReport(p, subs, S)


# ---------------------------------------------------------------------------
# 2-bridge knots

def two_bridge_lo(p: int, q: int, heights: Optional[Iterable[int]] = None) -> Disjunction:
    from .knots import two_bridge_signature
    sigma = two_bridge_signature(p, q)
    if sigma == 0:
        raise ZeroSignature(f"K({p}/{q}) has signature 0")
    if heights is not None:
        bad = [x for x in heights if x % 2 == 0]
        if bad:
            raise ParityViolation(f"even heights {bad} for a 2-bridge knot")
    return Disjunction((interval(-INF, 1, "LO"), interval(-1, INF, "LO")),
                       note="a good arc of odd type A_k exists since sigma != 0; "
                            "fillings are prime, so this is a statement about S_LO")


# ---------------------------------------------------------------------------
# plot data

CSV_HEADER = ("layer", "x", "y")


def pillowcase_rows(K=None, lens: Sequence = (), y_range: int = 10):
    """Rows (layer, x, y) on the strip 0 <= x <= 1.

    reducible_axis: the segment y = 0; dk_points: x = alpha/pi for each root;
    lens_<s>: for each lens line slope s, segment endpoints of every line of
    slope s meeting the window, two rows per line.
    """
    rows = []
    if K is None:
        return rows
    from .knots import alexander
    delta = alexander(K)
    rows.append(("reducible_axis", 0.0, 0.0))
    rows.append(("reducible_axis", 1.0, 0.0))
    for c, _ in d_k(delta).elements:
        rows.append(("dk_points", math.acos(float(c) / 2) / math.pi, 0.0))
    for s in lens:
        s = Fraction(s)
        p = abs(s.numerator)
        for n in range(-p * (y_range + 1), p * (y_range + 2)):
            L = lens_line(p, n, -s)
            (x0, y0), (x1, y1) = L.segment()
            if min(y0, y1) > y_range or max(y0, y1) < -y_range:
                continue
            rows.append((f"lens_{s}", float(x0), float(y0)))
            rows.append((f"lens_{s}", float(x1), float(y1)))
    return rows


def emit_pillowcase_data(K, out, lens: Sequence = (), y_range: int = 10) -> int:
    """Write CSV rows to a path or file object; returns the number of data rows."""
    rows = pillowcase_rows(K, lens, y_range)
    if hasattr(out, "write"):
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows((a, repr(x), repr(y)) for a, x, y in rows)
        return len(rows)
    with open(out, "w", newline="") as fh:
        return emit_pillowcase_data(K, fh, lens, y_range)
