"""Knot descriptors, Alexander polynomials, Seifert matrices and catalog IO.

Two-bridge knots: K(p/q) is always handled through its representative with
q odd (replace q by q - p when q is even).  The exponent pattern

    eps_i = (-1)^floor(i q / p),   i = 1 .. p-1

then drives the Alexander polynomial, the signature and the Riley word.
Chirality is pinned by requiring K(3/1) to be the positive trefoil, i.e.
sigma(-1) = -2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .errors import InvalidDescriptor, ParseError, PolyParseError, Unsupported
from .poly import LaurentPoly, as_laurent, normalize_symmetric

FLAGS = ("alternating", "montesinos", "small", "rep_small", "mirror_marker")


@dataclass(frozen=True)
class Torus:
    p: int
    q: int


@dataclass(frozen=True)
class TwoBridge:
    p: int
    q: int


@dataclass(frozen=True)
class Seifert:
    V: tuple  # tuple of row tuples


@dataclass(frozen=True)
class Raw:
    """Alexander polynomial only, optionally with signature data.

    ``signature`` is sigma(-1) of the (unmirrored) knot; ``jumps`` lists the
    signature jumps in order of increasing alpha on (0, pi/2).
    """
    alexander: LaurentPoly
    signature: Optional[int] = None
    jumps: Optional[tuple] = None


@dataclass(frozen=True)
class KnotDescriptor:
    presentation: object
    flags: frozenset = field(default_factory=frozenset)
    name: Optional[str] = None
    h: Optional[int] = None  # user-supplied Casson-Lin invariant, if known

    @property
    def mirrored(self) -> bool:
        return "mirror_marker" in self.flags

    @property
    def kind(self) -> str:
        return {Torus: "torus", TwoBridge: "two_bridge", Seifert: "seifert",
                Raw: "raw"}[type(self.presentation)]

    def label(self) -> str:
        if self.name:
            return self.name
        P = self.presentation
        if isinstance(P, Torus):
            s = f"T({P.p},{P.q})"
        elif isinstance(P, TwoBridge):
            s = f"K({P.p}/{P.q})"
        elif isinstance(P, Seifert):
            s = f"seifert{len(P.V)}"
        else:
            s = f"raw[{P.alexander}]"
        return s + ("*" if self.mirrored else "")


def _check(K: KnotDescriptor) -> KnotDescriptor:
    P = K.presentation
    bad = set(K.flags) - set(FLAGS)
    if bad:
        raise InvalidDescriptor(f"unknown flags {sorted(bad)}")
    if isinstance(P, Torus):
        if not (2 <= P.p < P.q and math.gcd(P.p, P.q) == 1):
            raise InvalidDescriptor(f"torus parameters must satisfy 2 <= p < q coprime: {P}")
    elif isinstance(P, TwoBridge):
        if not (P.p >= 3 and P.p % 2 == 1 and 0 < P.q < P.p and math.gcd(P.p, P.q) == 1):
            raise InvalidDescriptor(f"two-bridge knot needs odd p >= 3, 0 < q < p coprime: {P}")
    elif isinstance(P, Seifert):
        n = len(P.V)
        if n % 2 or any(len(r) != n for r in P.V):
            raise InvalidDescriptor("Seifert matrix must be square of even size")
        if n:
            d = _det([[P.V[i][j] - P.V[j][i] for j in range(n)] for i in range(n)])
            if abs(d) != 1:
                raise InvalidDescriptor(f"det(V - V^T) = {d}, expected +-1")
    elif isinstance(P, Raw):
        d = P.alexander
        try:
            dn = normalize_symmetric(d)
        except Exception as e:
            raise InvalidDescriptor(str(e)) from e
        if dn(1) != 1:
            raise InvalidDescriptor(f"Alexander polynomial must have |Delta(1)| = 1, got {d}")
        if P.signature is not None and P.signature % 2:
            raise InvalidDescriptor("signature must be even")
    else:
        raise InvalidDescriptor(f"unknown presentation {P!r}")
    return K


def knot(presentation, flags=(), name=None, h=None) -> KnotDescriptor:
    flags = frozenset(flags)
    if isinstance(presentation, TwoBridge):
        flags = flags | {"alternating", "small"}
    if isinstance(presentation, Seifert):
        presentation = Seifert(tuple(tuple(int(x) for x in r) for r in presentation.V))
    if isinstance(presentation, Raw):
        presentation = replace(presentation, alexander=normalize_symmetric(presentation.alexander))
    return _check(KnotDescriptor(presentation, flags, name, None if h is None else int(h)))


def torus(p, q, **kw) -> KnotDescriptor:
    p, q = sorted((abs(int(p)), abs(int(q))))
    return knot(Torus(p, q), **kw)


def two_bridge(p, q, **kw) -> KnotDescriptor:
    return knot(TwoBridge(int(p), int(q) % int(p)), **kw)


def seifert(V, **kw) -> KnotDescriptor:
    return knot(Seifert(tuple(tuple(r) for r in V)), **kw)


def raw(delta, signature=None, jumps=None, **kw) -> KnotDescriptor:
    return knot(Raw(as_laurent(delta), signature,
                    tuple(jumps) if jumps is not None else None), **kw)


UNKNOT = raw("1", signature=0, name="unknot")


# ---------------------------------------------------------------------------
# two-bridge combinatorics

def odd_representative(p: int, q: int) -> int:
    q = q % p
    return q if q % 2 else q - p


def epsilons(p: int, q: int) -> list:
    """Exponent pattern eps_i = (-1)^floor(i q / p) for the odd representative."""
    q = odd_representative(p, q)
    return [1 if ((i * q) // p) % 2 == 0 else -1 for i in range(1, p)]


def minkus_alexander(p: int, q: int) -> LaurentPoly:
    """Sum_{k=0}^{p-1} (-1)^k t^{e_k} with e_k the partial sums of eps."""
    eps = epsilons(p, q)
    c = {}
    e = 0
    for k in range(p):
        if k:
            e += eps[k - 1]
        c[e] = c.get(e, 0) + (-1) ** k
    return normalize_symmetric(LaurentPoly(c))


def two_bridge_signature(p: int, q: int) -> int:
    """sigma(-1) = -sum(eps) for the odd representative."""
    return -sum(epsilons(p, q))


def even_continued_fraction(p: int, q: int) -> list:
    """Entries a_i of p/q_even = 2a_1 - 1/(2a_2 - 1/(...)) where q_even is the even one of q, q-p."""
    q = q % p
    qe = q if q % 2 == 0 else q - p
    x = Fraction(p, qe)
    out = []
    while True:
        a = math.floor(x / 2 + Fraction(1, 2))  # nearest integer to x/2
        if abs(2 * a - x) >= 1:
            a += 1 if x > 2 * a else -1
        out.append(a)
        r = 2 * a - x
        if r == 0:
            break
        x = 1 / r
    return out


def two_bridge_seifert(p: int, q: int) -> list:
    a = even_continued_fraction(p, q)
    n = len(a)
    V = [[0] * n for _ in range(n)]
    for i in range(n):
        V[i][i] = a[i]
        if i + 1 < n:
            V[i][i + 1] = 1
    return V


def canonical_two_bridge(p: int, q: int) -> int:
    """Smallest q' in (0, p) with q' = +-q^{+-1} mod p (same unoriented knot up to mirror)."""
    q = q % p
    inv = pow(q, -1, p)
    return min(q, p - q, inv, p - inv)


def two_bridge_representatives(p_max: int):
    """Canonical (p, q) with 3 <= p < p_max odd, 0 < q < p coprime, up to q ~ +-q^{+-1}."""
    for p in range(3, p_max, 2):
        for q in range(1, p):
            if math.gcd(p, q) == 1 and canonical_two_bridge(p, q) == q:
                yield p, q


# ---------------------------------------------------------------------------
# invariants

def _det(M) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    A = [list(map(int, r)) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def _poly_det(M) -> LaurentPoly:
    """Determinant of a matrix of LaurentPolys by cofactor-free Gaussian elimination over Q(t).

    Uses Bareiss with exact Laurent division, which is valid over any integral domain.
    """
    A = [list(r) for r in M]
    n = len(A)
    if n == 0:
        return LaurentPoly.const(1)
    sign, prev = 1, LaurentPoly.const(1)
    for k in range(n - 1):
        if A[k][k].is_zero():
            for i in range(k + 1, n):
                if not A[i][k].is_zero():
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return LaurentPoly()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]).exact_div(prev)
        prev = A[k][k]
    return A[n - 1][n - 1] * sign


def seifert_alexander(V) -> LaurentPoly:
    """normalize_symmetric(det(V - t V^T))."""
    n = len(V)
    if n == 0:
        return LaurentPoly.const(1)
    t = LaurentPoly.monomial(1)
    M = [[LaurentPoly.const(V[i][j]) - t * V[j][i] for j in range(n)] for i in range(n)]
    return normalize_symmetric(_poly_det(M))


def torus_alexander(p: int, q: int) -> LaurentPoly:
    t = LaurentPoly.monomial(1)
    num = (t ** (p * q) - 1) * (t - 1)
    den = (t ** p - 1) * (t ** q - 1)
    return normalize_symmetric(num.exact_div(den))


def alexander(K: KnotDescriptor) -> LaurentPoly:
    """Symmetric Alexander polynomial with Delta(1) = 1."""
    P = K.presentation
    if isinstance(P, Torus):
        return torus_alexander(P.p, P.q)
    if isinstance(P, TwoBridge):
        return minkus_alexander(P.p, P.q)
    if isinstance(P, Seifert):
        return seifert_alexander(P.V)
    if isinstance(P, Raw):
        return normalize_symmetric(P.alexander)
    raise InvalidDescriptor(repr(P))


def determinant(K: KnotDescriptor) -> int:
    d = alexander(K)(-1)
    return abs(int(d))


def seifert_matrix(K: KnotDescriptor) -> list:
    """A Seifert matrix for the knot (mirror applied as V -> -V^T)."""
    P = K.presentation
    if isinstance(P, Seifert):
        V = [list(r) for r in P.V]
        return V
    if isinstance(P, Torus):
        if P.p != 2:
            raise Unsupported("no Seifert matrix model for T(p,q) with p >= 3")
        V = two_bridge_seifert(P.q, 1)
    elif isinstance(P, TwoBridge):
        V = two_bridge_seifert(P.p, P.q)
    else:
        raise Unsupported("raw presentations carry no Seifert matrix")
    if K.mirrored:
        n = len(V)
        V = [[-V[j][i] for j in range(n)] for i in range(n)]
    return V


def mirror(K: KnotDescriptor) -> KnotDescriptor:
    P = K.presentation
    flags = set(K.flags) ^ {"mirror_marker"}
    if isinstance(P, Seifert):
        n = len(P.V)
        P = Seifert(tuple(tuple(-P.V[j][i] for j in range(n)) for i in range(n)))
    return KnotDescriptor(P, frozenset(flags), K.name, None if K.h is None else -K.h)


def genus_bound(K: KnotDescriptor) -> int:
    """Half the degree span of Delta (the genus for the classes handled here)."""
    return alexander(K).span // 2


# ---------------------------------------------------------------------------
# catalog

@dataclass
class Catalog:
    entries: list

    def __post_init__(self):
        names = [k.name for k in self.entries if k.name]
        if len(names) != len(set(names)):
            raise InvalidDescriptor("catalog names must be unique")

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def descriptor_from_json(obj: dict) -> KnotDescriptor:
    if not isinstance(obj, dict):
        raise InvalidDescriptor("entry must be a JSON object")
    kind = obj.get("type")
    flags = obj.get("flags", [])
    name = obj.get("name")
    if not isinstance(flags, list) or not all(isinstance(f, str) for f in flags):
        raise InvalidDescriptor("flags must be an array of strings")
    kw = dict(flags=flags, name=name)
    if obj.get("h") is not None:
        kw["h"] = _int(obj, "h")
    if kind == "torus":
        return torus(_int(obj, "p"), _int(obj, "q"), **kw)
    if kind == "two_bridge":
        p, q = _int(obj, "p"), _int(obj, "q")
        if not (0 < q < p):
            raise InvalidDescriptor("two_bridge needs 0 < q < p")
        return two_bridge(p, q, **kw)
    if kind == "seifert":
        V = obj.get("seifert")
        if not isinstance(V, list) or not all(isinstance(r, list) for r in V):
            raise InvalidDescriptor("seifert must be a row-major integer matrix")
        return seifert(V, **kw)
    if kind == "raw":
        a = obj.get("alexander")
        if not isinstance(a, str):
            raise InvalidDescriptor("raw entries need an 'alexander' string")
        sig = obj.get("signature")
        jumps = obj.get("jumps")
        return raw(LaurentPoly.parse(a), signature=sig, jumps=jumps, **kw)
    raise InvalidDescriptor(f"unknown type {kind!r}")


def descriptor_to_json(K: KnotDescriptor) -> dict:
    P = K.presentation
    out = {"type": K.kind}
    if isinstance(P, (Torus, TwoBridge)):
        out.update(p=P.p, q=P.q)
    elif isinstance(P, Seifert):
        out["seifert"] = [list(r) for r in P.V]
    else:
        out["alexander"] = str(P.alexander)
        if P.signature is not None:
            out["signature"] = P.signature
        if P.jumps is not None:
            out["jumps"] = list(P.jumps)
    if K.flags:
        out["flags"] = sorted(K.flags)
    if K.name:
        out["name"] = K.name
    if K.h is not None:
        out["h"] = K.h
    return out


def _int(obj, key):
    v = obj.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise InvalidDescriptor(f"field {key!r} must be an integer")
    return v


def parse_catalog(lines) -> Catalog:
    entries = []
    for n, line in enumerate(lines, 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            entries.append(descriptor_from_json(json.loads(s)))
        except (json.JSONDecodeError, InvalidDescriptor, PolyParseError, TypeError, ValueError) as e:
            raise ParseError(n, str(e)) from e
    return Catalog(entries)


def load_catalog(path) -> Catalog:
    with open(path, encoding="utf-8") as fh:
        return parse_catalog(fh)


def parse_knot_spec(s: str) -> KnotDescriptor:
    """Command-line shorthand: ``torus:2,3``, ``2bridge:479/29``, ``raw:"t-1+t^-1"``,
    ``seifert:[[-1,1],[0,-1]]`` or a JSON object.  Flags may follow after ``;``,
    e.g. ``raw:...;alternating,small;sigma=-6;h=3``."""
    s = s.strip()
    if s.startswith("{"):
        return descriptor_from_json(json.loads(s))
    head, _, rest = s.partition(";")
    extras = [x for x in rest.split(";") if x] if rest else []
    flags, sig, h = [], None, None
    for x in extras:
        if x.startswith("sigma="):
            sig = int(x[6:])
        elif x.startswith("h="):
            h = int(x[2:])
        else:
            flags.extend(f for f in x.split(",") if f)
    kind, _, body = head.partition(":")
    kind = kind.lower()
    body = body.strip().strip('"').strip("'")
    if kind == "torus":
        p, q = body.split(",")
        return torus(int(p), int(q), flags=flags, h=h)
    if kind in ("2bridge", "two_bridge", "twobridge"):
        p, q = body.replace(",", "/").split("/")
        return two_bridge(int(p), int(q), flags=flags, h=h)
    if kind == "seifert":
        return seifert(json.loads(body), flags=flags, h=h)
    if kind == "raw":
        return raw(LaurentPoly.parse(body), signature=sig, flags=flags, h=h)
    raise InvalidDescriptor(f"cannot parse knot spec {s!r}")
