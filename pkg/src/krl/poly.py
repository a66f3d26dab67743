"""Exact Laurent polynomials, palindromic normal forms and Sturm root isolation.

Everything in this module is exact rational arithmetic.  Ordinary
polynomials are LaurentPoly objects with nonnegative support; internally the
root-isolation code works on dense coefficient lists (lowest degree first).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import NotPalindromic, NotReciprocal, PolyParseError


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        raise TypeError("floating point coefficients are not allowed")
    return Fraction(c)


class LaurentPoly:
    """Sparse Laurent polynomial with rational coefficients.

    >>> p = LaurentPoly.parse("t - 1 + t^-1")
    >>> p(1)
    Fraction(1, 1)
    >>> str(p * p)
    't^2-2*t+3-2*t^-1+t^-2'
    """

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for e, v in dict(coeffs).items():
                v = _frac(v)
                if v:
                    c[int(e)] = v
        self._c = c
        self._hash = None

    # constructors

    @classmethod
    def from_list(cls, coeffs: Sequence, low: int = 0) -> "LaurentPoly":
        return cls({low + i: v for i, v in enumerate(coeffs)})

    @classmethod
    def monomial(cls, e: int, c=1) -> "LaurentPoly":
        return cls({e: c})

    @classmethod
    def const(cls, c) -> "LaurentPoly":
        return cls({0: c})

    # basic data

    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items())

    def __getitem__(self, e: int) -> Fraction:
        return self._c.get(e, Fraction(0))

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    @property
    def low(self):
        return min(self._c) if self._c else None

    @property
    def high(self):
        return max(self._c) if self._c else None

    @property
    def span(self) -> int:
        return self.high - self.low if self._c else 0

    def degree(self) -> int:
        """Largest exponent (``-1`` for zero, which only makes sense for ordinary polys)."""
        return self.high if self._c else -1

    def leading_coefficient(self) -> Fraction:
        return self._c[self.high] if self._c else Fraction(0)

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self._c.values())

    def is_ordinary(self) -> bool:
        return not self._c or self.low >= 0

    # arithmetic

    @staticmethod
    def _coerce(other):
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c = dict(self._c)
        for e, v in other._c.items():
            c[e] = c.get(e, 0) + v
        return LaurentPoly(c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -v for e, v in self._c.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LaurentPoly({e: v * other for e, v in self._c.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                c[e1 + e2] = c.get(e1 + e2, 0) + v1 * v2
        return LaurentPoly(c)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self._c) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, v), = self._c.items()
            return LaurentPoly({e * n: v ** n})
        result = LaurentPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    def __call__(self, x):
        """Evaluate at ``x`` (any ring element supporting ``*``, ``+`` and ``**``)."""
        if isinstance(x, int) and not isinstance(x, bool):
            x = Fraction(x)
        if not self._c:
            return 0 * x
        low, dense = self.to_dense()
        acc = 0 * x
        for v in reversed(dense):
            acc = acc * x + (v if isinstance(x, (int, Fraction)) else _scalar(v, x))
        if low:
            acc = acc * x ** low
        return acc

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly({e + k: v for e, v in self._c.items()})

    def bar(self) -> "LaurentPoly":
        """Substitute t -> 1/t."""
        return LaurentPoly({-e: v for e, v in self._c.items()})

    def is_palindromic(self) -> bool:
        return self == self.bar()

    def derivative(self) -> "LaurentPoly":
        return LaurentPoly({e - 1: e * v for e, v in self._c.items() if e})

    def subs_power(self, k: int) -> "LaurentPoly":
        """Substitute t -> t^k."""
        return LaurentPoly({e * k: v for e, v in self._c.items()})

    def to_dense(self):
        """Return ``(low, [c_low, ..., c_high])``."""
        if not self._c:
            return 0, []
        lo, hi = self.low, self.high
        return lo, [self._c.get(e, Fraction(0)) for e in range(lo, hi + 1)]

    def as_ordinary(self) -> list:
        """Dense ascending coefficient list; requires nonnegative support."""
        if not self._c:
            return []
        if self.low < 0:
            raise ValueError("polynomial has negative exponents")
        return [self._c.get(e, Fraction(0)) for e in range(0, self.high + 1)]

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Exact division in Q[t, 1/t]; raises ValueError if it does not divide."""
        if other.is_zero():
            raise ZeroDivisionError
        if self.is_zero():
            return LaurentPoly()
        a_low, a = self.to_dense()
        b_low, b = other.to_dense()
        q, r = _divmod(a, b)
        if _trim(r):
            raise ValueError("division is not exact")
        return LaurentPoly.from_list(q, a_low - b_low)

    def divides(self, other: "LaurentPoly") -> bool:
        try:
            other.exact_div(self)
            return True
        except ValueError:
            return False

    # text format

    def format(self, var: str = "t") -> str:
        if not self._c:
            return "0"
        out = []
        for e in sorted(self._c, reverse=True):
            v = self._c[e]
            sign = "-" if v < 0 else "+"
            a = abs(v)
            if e == 0:
                body = str(a)
            else:
                mono = var if e == 1 else f"{var}^{e}"
                body = mono if a == 1 else f"{a}*{mono}"
            out.append((sign, body))
        s = "".join(sg + b for sg, b in out)
        return s[1:] if s[0] == "+" else s

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"LaurentPoly({self.format()!r})"

    _TERM = re.compile(r"(?:(\d+(?:/\d+)?)\*?)?(?:([a-z])(?:\^\(?(-?\d+)\)?)?)?")

    @classmethod
    def parse(cls, s: str) -> "LaurentPoly":
        """Parse text such as ``"8*t^6-21*t^5+27*t^4 - t^-1 + 3/2"``."""
        if not isinstance(s, str):
            raise PolyParseError(f"expected a string, got {type(s).__name__}")
        src = s
        s = s.replace("−", "-").replace("**", "^").replace(" ", "")
        if not s:
            raise PolyParseError("empty polynomial")
        terms = []
        start = 0
        for i, ch in enumerate(s):
            if ch in "+-" and i > 0 and s[i - 1] not in "^(":
                terms.append(s[start:i])
                start = i
        terms.append(s[start:])
        c = {}
        var = None
        for term in terms:
            sign = 1
            while term and term[0] in "+-":
                if term[0] == "-":
                    sign = -sign
                term = term[1:]
            m = cls._TERM.fullmatch(term)
            if not term or m is None or (m.group(1) is None and m.group(2) is None):
                raise PolyParseError(f"cannot parse term {term!r} in {src!r}")
            coef = Fraction(m.group(1)) if m.group(1) else Fraction(1)
            if m.group(2):
                if var is None:
                    var = m.group(2)
                elif var != m.group(2):
                    raise PolyParseError(f"mixed variables in {src!r}")
                e = int(m.group(3)) if m.group(3) is not None else 1
            else:
                if m.group(3) is not None:
                    raise PolyParseError(f"bad term {term!r}")
                e = 0
            c[e] = c.get(e, 0) + sign * coef
        return cls(c)


def _scalar(v: Fraction, x):
    # coefficient coerced into the ring of x (complex, mpmath, flint balls ...)
    if v.denominator == 1:
        return int(v.numerator) + 0 * x
    return (0 * x + int(v.numerator)) / int(v.denominator)


T = LaurentPoly.monomial(1)


def as_laurent(p) -> LaurentPoly:
    if isinstance(p, LaurentPoly):
        return p
    if isinstance(p, str):
        return LaurentPoly.parse(p)
    if isinstance(p, (int, Fraction)):
        return LaurentPoly.const(p)
    return LaurentPoly.from_list(list(p))


# ---------------------------------------------------------------------------
# dense helpers (ascending coefficient lists of Fractions)

def _trim(a: list) -> list:
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def _deriv(a: list) -> list:
    return [i * a[i] for i in range(1, len(a))]


def _divmod(a: list, b: list):
    a = [Fraction(x) for x in _trim(a)]
    b = _trim(b)
    if not b:
        raise ZeroDivisionError
    if len(a) < len(b):
        return [], a
    lb = Fraction(b[-1])
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] / lb
        q[k] = c
        if c:
            for j, bj in enumerate(b):
                a[k + j] -= c * bj
    return q, _trim(a[: len(b) - 1])


def _monic(a: list) -> list:
    a = _trim(a)
    if not a:
        return a
    lc = Fraction(a[-1])
    return [Fraction(x) / lc for x in a]


def _gcd(a: list, b: list) -> list:
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    return _monic(a)


def _eval(a: list, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _primitive(a: list) -> list:
    """Scale to a primitive integer polynomial with positive leading coefficient."""
    from math import gcd, lcm
    a = _trim(a)
    if not a:
        return a
    den = 1
    for c in a:
        den = lcm(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in a]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return [Fraction(c) for c in ints]


def squarefree_decomposition(a: list):
    """Yun's algorithm: list of (factor, multiplicity) with squarefree coprime factors."""
    a = _monic(a)
    if len(a) <= 1:
        return []
    out = []
    b = _gcd(a, _deriv(a))
    c, _ = _divmod(a, b)
    d, _ = _divmod(_deriv(a), b)
    d = [x - y for x, y in _zip_pad(d, _deriv(c))]
    i = 1
    while len(_trim(c)) > 1:
        g = _gcd(c, d)
        if len(g) > 1:
            out.append((_primitive(g), i))
        c, _ = _divmod(c, g)
        y, _ = _divmod(d, g)
        d = [x - z for x, z in _zip_pad(y, _deriv(c))]
        i += 1
    return out


def _zip_pad(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return zip(a, b)


def squarefree_part(a: list) -> list:
    out = [Fraction(1)]
    for f, _ in squarefree_decomposition(a):
        out = _mul(out, f)
    return _primitive(out)


def _mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


# ---------------------------------------------------------------------------
# Sturm sequences

def sturm_chain(a: list) -> list:
    a = _trim(a)
    chain = [a, _deriv(a)]
    while _trim(chain[-1]):
        _, r = _divmod(chain[-2], chain[-1])
        r = [-x for x in r]
        if not _trim(r):
            break
        chain.append(r)
    return [c for c in chain if _trim(c)]


def _variations(chain, x: Fraction) -> int:
    signs = [_sign(_eval(p, x)) for p in chain]
    signs = [s for s in signs if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def _count_open(chain, lo: Fraction, hi: Fraction) -> int:
    """Distinct roots of the squarefree chain[0] in the open interval (lo, hi)."""
    n = _variations(chain, lo) - _variations(chain, hi)
    if _eval(chain[0], hi) == 0:
        n -= 1
    return n


def root_bound(a: list) -> Fraction:
    """Cauchy bound: every real root has absolute value below the result."""
    a = _trim(a)
    lc = abs(Fraction(a[-1]))
    return 1 + max((abs(Fraction(c)) / lc for c in a[:-1]), default=Fraction(0))


@dataclass(frozen=True)
class AlgebraicReal:
    """A real algebraic number: a squarefree polynomial and an isolating interval.

    The open interval (lo, hi) contains exactly one root of ``poly`` and neither
    endpoint is a root.  ``poly`` is a tuple of Fractions, lowest degree first.
    """

    poly: tuple
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("empty isolating interval")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self):
        r = self.refine(Fraction(1, 2 ** 60))
        return float(r.midpoint())

    def _sign_lo(self) -> int:
        return _sign(_eval(list(self.poly), self.lo))

    def bisect(self) -> "AlgebraicReal":
        p = list(self.poly)
        m = self.midpoint()
        fm = _eval(p, m)
        if fm == 0:
            w = self.width / 4
            return AlgebraicReal(self.poly, m - w, m + w)
        if _sign(fm) == self._sign_lo():
            return AlgebraicReal(self.poly, m, self.hi)
        return AlgebraicReal(self.poly, self.lo, m)

    def refine(self, width) -> "AlgebraicReal":
        """Nested isolating interval of width at most ``width``."""
        r = self
        width = Fraction(width)
        while r.width > width:
            r = r.bisect()
        return r

    def exact_value(self):
        """The root as a Fraction if it is rational, else None."""
        p = list(self.poly)
        if len(p) == 2:
            return -p[0] / p[1]
        return None

    def compare(self, x: Fraction) -> int:
        """Sign of (self - x) for rational x, exact."""
        x = Fraction(x)
        p = list(self.poly)
        r = self
        while True:
            if x <= r.lo:
                return 1
            if x >= r.hi:
                return -1
            if _eval(p, x) == 0:
                return 0
            r = r.bisect()

    def compare_to(self, other: "AlgebraicReal") -> int:
        """Sign of (self - other); equality decided with a gcd."""
        a, b = self, other
        for _ in range(64):
            if a.hi <= b.lo:
                return -1
            if b.hi <= a.lo:
                return 1
            a, b = a.bisect(), b.bisect()
        g = _gcd(list(a.poly), list(b.poly))
        if len(g) > 1:
            lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
            if lo < hi and _count_open(sturm_chain(g), lo, hi) == 1 \
                    and _eval(g, lo) != 0 and _eval(g, hi) != 0:
                return 0
        while True:
            if a.hi <= b.lo:
                return -1
            if b.hi <= a.lo:
                return 1
            a, b = a.bisect(), b.bisect()

    def to_json(self):
        return {"lo": str(self.lo), "hi": str(self.hi), "approx": float(self)}


def _split_point(chain, lo: Fraction, hi: Fraction) -> Fraction:
    # a point strictly inside (lo, hi) that is not a root
    for num, den in ((1, 2), (1, 3), (2, 3), (2, 5), (3, 5), (3, 7)):
        m = lo + (hi - lo) * num / den
        if _eval(chain[0], m) != 0:
            return m
    k = 11
    while True:
        m = lo + (hi - lo) * Fraction(k // 2, k)
        if _eval(chain[0], m) != 0:
            return m
        k += 2


def _isolate_squarefree(f: list, lo: Fraction, hi: Fraction) -> list:
    chain = sturm_chain(f)
    # move endpoints off roots so that every interval has nonroot endpoints
    if _eval(f, lo) == 0:
        d = (hi - lo) / 2
        while _count_open(chain, lo, lo + d) > 0 or _eval(f, lo + d) == 0:
            d /= 2
        lo = lo + d
    if _eval(f, hi) == 0:
        d = (hi - lo) / 2
        while _count_open(chain, hi - d, hi) > 0 or _eval(f, hi - d) == 0:
            d /= 2
        hi = hi - d
    out = []
    stack = [(lo, hi, _count_open(chain, lo, hi))]
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append(AlgebraicReal(tuple(f), a, b))
            continue
        m = _split_point(chain, a, b)
        stack.append((m, b, _count_open(chain, m, b)))
        stack.append((a, m, _count_open(chain, a, m)))
    out.sort(key=lambda r: r.lo)
    return out


def _dense(g) -> list:
    if isinstance(g, LaurentPoly):
        return [Fraction(c) for c in g.as_ordinary()]
    return [Fraction(c) for c in g]


def sturm_isolate(g, lo, hi) -> list:
    """Isolate the distinct real roots of ``g`` in the open interval (lo, hi).

    Returns a sorted list of ``(AlgebraicReal, multiplicity)``.  The squarefree
    factors are isolated separately and then refined until all intervals are
    pairwise disjoint.
    """
    a = _trim(_dense(g))
    lo, hi = Fraction(lo), Fraction(hi)
    if len(a) <= 1 or not lo < hi:
        return []
    roots = []
    for f, m in squarefree_decomposition(a):
        for r in _isolate_squarefree(f, lo, hi):
            roots.append([r, m])
    # different factors have no common roots, so bisection separates them
    changed = True
    while changed:
        changed = False
        roots.sort(key=lambda x: x[0].lo)
        for i in range(len(roots) - 1):
            r, s = roots[i][0], roots[i + 1][0]
            if r.hi > s.lo:
                roots[i][0], roots[i + 1][0] = r.bisect(), s.bisect()
                changed = True
    roots.sort(key=lambda x: x[0].lo)
    return [(r, m) for r, m in roots]


def real_roots(g) -> list:
    """All distinct real roots of ``g`` with multiplicities."""
    a = _trim(_dense(g))
    if len(a) <= 1:
        return []
    b = root_bound(a)
    return sturm_isolate(a, -b, b)


# ---------------------------------------------------------------------------
# palindromic polynomials

def normalize_symmetric(p) -> LaurentPoly:
    """Unit multiple u t^k p with q(t) = q(1/t) and q(1) > 0.

    If q(1) = 0 (never the case for an Alexander polynomial) the leading
    coefficient is made positive instead.
    """
    p = as_laurent(p)
    if p.is_zero():
        raise NotReciprocal("zero polynomial")
    s = p.low + p.high
    if s % 2:
        raise NotReciprocal(f"{p} has odd degree span")
    q = p.shift(-(s // 2))
    if q != q.bar():
        raise NotReciprocal(f"{p} is not a unit multiple of a palindromic polynomial")
    v = q(1)
    if v < 0 or (v == 0 and q.leading_coefficient() < 0):
        q = -q
    return q


@lru_cache(maxsize=None)
def _dickson(k: int) -> tuple:
    """D_k with D_k(t + 1/t) = t^k + t^-k, as an ascending tuple."""
    if k == 0:
        return (Fraction(2),)
    if k == 1:
        return (Fraction(0), Fraction(1))
    a, b = list(_dickson(k - 1)), list(_dickson(k - 2))
    xa = [Fraction(0)] + a
    return tuple(x - y for x, y in _zip_pad(xa, b))


def chebyshev_form(q) -> LaurentPoly:
    """The polynomial g with g(t + 1/t) = q(t) for palindromic q."""
    q = as_laurent(q)
    if q != q.bar():
        raise NotPalindromic(f"{q} is not palindromic")
    if q.is_zero():
        return LaurentPoly()
    out = [q[0]]
    for k in range(1, q.high + 1):
        if q[k]:
            d = _dickson(k)
            out = [x + q[k] * y for x, y in _zip_pad(out, d)]
    return LaurentPoly.from_list(out)


def from_chebyshev(g) -> LaurentPoly:
    """Inverse of chebyshev_form: substitute x = t + 1/t."""
    x = LaurentPoly({1: 1, -1: 1})
    return as_laurent(g)(x)


def count_unit_circle_roots(delta) -> int:
    """Number of roots of a reciprocal polynomial on |t| = 1, with multiplicity."""
    d = as_laurent(delta)
    if d.is_zero():
        raise ValueError("zero polynomial")
    g = chebyshev_form(normalize_symmetric(d))
    a = _dense(g)
    r = 0
    for root, m in sturm_isolate(a, -2, 2):
        r += 2 * m
    # t = -1 and t = 1 correspond to x = -2, 2; each x-root is a double t-root
    for x0 in (Fraction(-2), Fraction(2)):
        r += 2 * _root_multiplicity(a, x0)
    return r


def _root_multiplicity(a: list, x0: Fraction) -> int:
    m = 0
    a = _trim(a)
    while a and _eval(a, x0) == 0:
        a, _ = _divmod(a, [-x0, Fraction(1)])
        m += 1
    return m


def chebyshev_roots(delta) -> list:
    """Roots of the Chebyshev form in (-2, 2) with multiplicities."""
    return sturm_isolate(chebyshev_form(normalize_symmetric(delta)), -2, 2)


@lru_cache(maxsize=None)
def cyclotomic(m: int) -> LaurentPoly:
    """The m-th cyclotomic polynomial."""
    p = LaurentPoly({m: 1, 0: -1})
    for d in range(1, m):
        if m % d == 0:
            p = p.exact_div(cyclotomic(d))
    return p


def compose_square_minus_two(g) -> list:
    """Dense coefficients of g(c^2 - 2), used to pass from x = 2cos 2a to c = 2cos a."""
    sub = [Fraction(-2), Fraction(0), Fraction(1)]
    out = []
    for coef in reversed(_dense(g)):
        out = _mul(out, sub) if out else []
        out = [x + y for x, y in _zip_pad(out, [coef])]
    return _trim(out)


def poly_from_roots_product(factors: Iterable) -> LaurentPoly:
    out = LaurentPoly.const(1)
    for f in factors:
        out = out * as_laurent(f)
    return out
