"""Levine-Tristram signature functions, the set D_K and the partition A_K.

Conventions.  For a Seifert matrix V and omega on the unit circle,

    sigma(omega) = sig((1 - omega) V + (1 - conj(omega)) V^T),

so that the positive trefoil has sigma(-1) = -2.  A signature function is
stored on alpha in [0, pi] with omega = e^{2 i alpha}; its breakpoints are the
alpha with 2cos(alpha) in D_K.  Breakpoints are kept as algebraic numbers
c = 2cos(alpha), never as floating point angles.

Values between breakpoints are exact: H(omega) is evaluated at rational points
omega = (1 + i s)^2 / (1 + s^2) of the unit circle and its signature is read
off an exact symmetric LDL factorization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from flint import arb, ctx, fmpq, fmpq_mat, fmpq_poly, fmpz_poly

from .errors import NoSignature, NotSeifert, OnJump
from .poly import (AlgebraicReal, LaurentPoly, as_laurent, chebyshev_form,
                   compose_square_minus_two, cyclotomic, normalize_symmetric, squarefree_decomposition,
                   sturm_isolate, _dense)


# ---------------------------------------------------------------------------
# small helpers around flint balls

def arb_bounds(x: arb):
    """Exact rational (lo, hi) enclosing the ball x."""
    m, e = x.mid().man_exp()
    r, f = x.rad().man_exp()
    mid = Fraction(int(m)) * (Fraction(2) ** int(e))
    rad = Fraction(int(r)) * (Fraction(2) ** int(f))
    return mid - rad, mid + rad


def arb_from_fraction(x: Fraction) -> arb:
    return arb(fmpq(x.numerator, x.denominator))


def two_cos_pi(r: Fraction, prec: int = 128) -> arb:
    """Ball for 2 cos(pi r)."""
    old = ctx.prec
    ctx.prec = prec
    try:
        return 2 * arb.cos_pi_fmpq(fmpq(r.numerator, r.denominator))
    finally:
        ctx.prec = old


# ---------------------------------------------------------------------------
# exact signature of rational symmetric / Hermitian matrices

def _sign_changes(cs) -> int:
    cs = [c for c in cs if c != 0]
    return sum(1 for a, b in zip(cs, cs[1:]) if (a > 0) != (b > 0))


def symmetric_signature(M) -> tuple:
    """(positive, negative, zero) inertia of a rational symmetric matrix, exactly.

    The characteristic polynomial of a symmetric matrix is real rooted, so
    Descartes' rule of signs counts its positive and negative roots exactly.
    """
    n = len(M)
    if n == 0:
        return 0, 0, 0
    F = fmpq_mat(n, n, [fmpq(Fraction(x).numerator, Fraction(x).denominator) for r in M for x in r])
    cs = F.charpoly().coeffs()
    zero = next(i for i, c in enumerate(cs) if c != 0)
    pos = _sign_changes(cs)
    neg = _sign_changes([c if i % 2 == 0 else -c for i, c in enumerate(cs)])
    return pos, neg, zero


def ldl_inertia(M) -> tuple:
    """Inertia by exact symmetric Gaussian elimination (independent of symmetric_signature)."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    pos = neg = 0
    idx = list(range(n))
    while idx:
        piv = next((i for i in idx if A[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in idx for j in idx if i < j and A[i][j] != 0), None)
            if pair is None:
                break  # remaining block is zero
            i, j = pair
            # congruence: row/col i += row/col j makes the (i, i) entry 2 A[i][j]
            for k in range(n):
                A[i][k] += A[j][k]
            for k in range(n):
                A[k][i] += A[k][j]
            piv = i
        d = A[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        idx.remove(piv)
        col = [A[k][piv] for k in range(n)]
        for i in idx:
            if col[i]:
                f = col[i] / d
                Ai = A[i]
                for j in idx:
                    Ai[j] -= f * col[j]
    zero = n - pos - neg
    return pos, neg, zero


def hermitian_signature(re, im) -> int:
    """Signature of the Hermitian matrix re + i im (re symmetric, im antisymmetric)."""
    n = len(re)
    M = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            M[i][j] = M[n + i][n + j] = Fraction(re[i][j])
            M[i][n + j] = -Fraction(im[i][j])
            M[n + i][j] = Fraction(im[i][j])
    p, q, z = symmetric_signature(M)
    return (p - q) // 2


def seifert_form_signature(V, s: Optional[Fraction]) -> int:
    """sigma at omega = (1 + i s)^2 / (1 + s^2); s = None means omega = -1."""
    n = len(V)
    if n == 0:
        return 0
    if s is None:
        a, b = Fraction(-1), Fraction(0)
    else:
        s = Fraction(s)
        d = 1 + s * s
        a, b = (1 - s * s) / d, 2 * s / d
    # (1 - w) V + (1 - wbar) V^T, w = a + ib
    re = [[(1 - a) * (V[i][j] + V[j][i]) for j in range(n)] for i in range(n)]
    im = [[-b * (V[i][j] - V[j][i]) for j in range(n)] for i in range(n)]
    return hermitian_signature(re, im)


def rational_sqrt_between(A: Fraction, B) -> Fraction:
    """A positive rational s with A < s^2 < B (B may be None for +infinity)."""
    A = Fraction(A)
    if B is None:
        target = A + 1 if A >= 0 else Fraction(1)
        B = 2 * target + 1
    B = Fraction(B)
    if A < 0:
        A = Fraction(0)
    den = 1
    while True:
        # search integers k with A < (k/den)^2 < B
        lo = math.isqrt(int(A * den * den)) if A > 0 else 0
        for k in (lo, lo + 1, lo + 2):
            s = Fraction(k, den)
            if s > 0 and A < s * s < B:
                return s
        den *= 2


# ---------------------------------------------------------------------------
# D_K

@dataclass(frozen=True)
class DKSet:
    """c = 2cos(alpha) over unit circle roots e^{2 i alpha} of Delta, sorted increasingly."""
    elements: tuple  # of (AlgebraicReal, multiplicity)

    def __len__(self):
        return len(self.elements)

    def positive(self):
        """Positive elements in decreasing order (alpha increasing on (0, pi/2))."""
        pos = [(c, m) for c, m in self.elements if c.lo >= 0]
        return list(reversed(pos))

    def values(self):
        return [float(c) for c, _ in self.elements]

    def contains(self, c) -> bool:
        if isinstance(c, AlgebraicReal):
            return any(e.compare_to(c) == 0 for e, _ in self.elements)
        return any(e.compare(Fraction(c)) == 0 for e, _ in self.elements)

    def to_json(self):
        return [dict(e.to_json(), multiplicity=m) for e, m in self.elements]


def d_k(delta) -> DKSet:
    """D_K for a palindromic Delta: c = +-sqrt(2 + x) over Chebyshev roots x in (-2, 2)."""
    d = normalize_symmetric(as_laurent(delta))
    g = _dense(chebyshev_form(d))
    out = []
    for f, m in squarefree_decomposition(g):
        G = compose_square_minus_two(f)
        for r, mm in sturm_isolate(G, -2, 2):
            # G is squarefree when f(-2) != 0 which holds for knots
            out.append((r, m * mm))
    out.sort(key=lambda x: x[0].lo)
    # make intervals disjoint and of one sign
    for i, (r, m) in enumerate(out):
        if r.compare(Fraction(0)) == 0:
            raise ValueError("Delta(-1) = 0 is impossible for a knot")
        while r.lo <= 0 <= r.hi or r.hi >= 2 or r.lo <= -2:
            r = r.bisect()
        out[i] = (r, m)
    changed = True
    while changed:
        changed = False
        for i in range(len(out) - 1):
            if out[i][0].hi >= out[i + 1][0].lo:
                out[i] = (out[i][0].bisect(), out[i][1])
                out[i + 1] = (out[i + 1][0].bisect(), out[i + 1][1])
                changed = True
    return DKSet(tuple(out))


# ---------------------------------------------------------------------------
# signature step functions

@dataclass(frozen=True)
class Jump:
    c: AlgebraicReal            # 2 cos(alpha)
    multiplicity: int
    alpha_over_pi: Optional[Fraction] = None  # exact location when known

    def alpha_ball(self, prec: int = 128) -> arb:
        if self.alpha_over_pi is not None:
            old = ctx.prec
            ctx.prec = prec
            try:
                return arb.pi() * arb_from_fraction(self.alpha_over_pi)
            finally:
                ctx.prec = old
        old = ctx.prec
        ctx.prec = prec
        try:
            lo = (arb_from_fraction(self.c.hi) / 2).acos()
            hi = (arb_from_fraction(self.c.lo) / 2).acos()
            return arb.union(lo, hi)
        finally:
            ctx.prec = old

    def alpha(self) -> float:
        r = Jump(self.c.refine(Fraction(1, 2 ** 60)), self.multiplicity, self.alpha_over_pi)
        return float(r.alpha_ball().mid())

    def alpha_interval(self, width=Fraction(1, 10 ** 12)):
        """Rational (lo, hi) containing alpha with hi - lo < width."""
        j, prec = self, 96
        while True:
            lo, hi = arb_bounds(j.alpha_ball(prec))
            if hi - lo < width:
                return lo, hi
            if j.alpha_over_pi is None:
                j = j.refine(j.c.width / 2 ** 16)
            prec += 32

    def to_json(self):
        lo, hi = self.alpha_interval()
        out = {"lo": float(lo), "hi": float(hi), "c_lo": str(self.c.lo), "c_hi": str(self.c.hi),
               "c": float(self.c), "multiplicity": self.multiplicity}
        if self.alpha_over_pi is not None:
            out["alpha_over_pi"] = str(self.alpha_over_pi)
        return out

    def refine(self, width) -> "Jump":
        return Jump(self.c.refine(width), self.multiplicity, self.alpha_over_pi)


@dataclass(frozen=True)
class SignatureStep:
    """Step function alpha in [0, pi] -> even integers.

    ``jumps`` are sorted by increasing alpha (decreasing c); ``values[i]`` is
    the value on the i-th open interval.
    """
    jumps: tuple
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.jumps) + 1:
            raise ValueError("need one more value than jumps")

    def is_constant(self) -> bool:
        return len(set(self.values)) == 1

    def interval_index(self, c) -> int:
        """Index of the open interval containing alpha = arccos(c/2); c rational or AlgebraicReal."""
        k = 0
        for j in self.jumps:
            s = j.c.compare_to(c) if isinstance(c, AlgebraicReal) else j.c.compare(Fraction(c))
            if s == 0:
                raise OnJump(f"c = {float(c):.6g} is in D_K")
            if s > 0:
                k += 1
        return k

    def value_at_c(self, c) -> int:
        c0 = c if isinstance(c, AlgebraicReal) else Fraction(c)
        if not isinstance(c0, AlgebraicReal) and not (-2 <= c0 <= 2):
            raise ValueError("c must lie in [-2, 2]")
        return self.values[self.interval_index(c0)]

    def at_minus_one(self) -> int:
        """sigma(-1): the value on the interval containing alpha = pi/2."""
        return self.value_at_c(0)

    def sample_points(self) -> list:
        """One rational c = 2cos(alpha) inside each open interval, in interval order."""
        cs = [Fraction(2)]
        for j in self.jumps:
            cs.append(j.c.hi)
            cs.append(j.c.lo)
        cs.append(Fraction(-2))
        return [(cs[2 * i] + cs[2 * i + 1]) / 2 for i in range(len(self.jumps) + 1)]

    @property
    def half_values(self):
        return tuple(v // 2 for v in self.values)

    def jump_sizes(self):
        return [b - a for a, b in zip(self.values, self.values[1:])]

    def to_json(self):
        return {"jumps": [j.to_json() for j in self.jumps], "values": list(self.values)}


def _jumps_from_dk(D: DKSet) -> list:
    return [Jump(c, m) for c, m in sorted(D.elements, key=lambda x: x[0].lo, reverse=True)]


def _gap_sample(c_hi: Fraction, c_lo: Fraction) -> Fraction:
    """Rational s > 0 with 2/sqrt(1 + s^2) strictly between c_lo >= 0 and c_hi <= 2."""
    A = 4 / (c_hi * c_hi) - 1
    B = None if c_lo == 0 else 4 / (c_lo * c_lo) - 1
    return rational_sqrt_between(A, B)


def _check_seifert(V):
    n = len(V)
    if any(len(r) != n for r in V) or n % 2:
        raise NotSeifert("Seifert matrix must be square of even size")
    if n:
        from .knots import _det
        d = _det([[V[i][j] - V[j][i] for j in range(n)] for i in range(n)])
        if abs(d) != 1:
            raise NotSeifert(f"det(V - V^T) = {d}")


def levine_tristram(V, full: bool = False, delta=None) -> SignatureStep:
    """Signature step function of a Seifert matrix.

    Values on alpha < pi/2 are computed at rational sample points and mirrored
    to alpha > pi/2 (conjugation symmetry); ``full=True`` evaluates every
    interval independently instead.
    """
    from .knots import seifert_alexander
    V = [[int(x) for x in r] for r in V]
    _check_seifert(V)
    if not V:
        return SignatureStep((), (0,))
    if delta is None:
        delta = seifert_alexander(V)
    D = d_k(delta)
    jumps = _jumps_from_dk(D)
    pos = [j for j in jumps if j.c.lo > 0]
    k = len(pos)
    vals = []
    for i in range(k):
        c_hi = Fraction(2) if i == 0 else pos[i - 1].c.lo
        c_lo = pos[i].c.hi
        vals.append(seifert_form_signature(V, _gap_sample(c_hi, c_lo)))
    middle = seifert_form_signature(V, None)
    if full:
        right = []
        for i in range(k):
            c_hi = Fraction(2) if i == 0 else pos[i - 1].c.lo
            c_lo = pos[i].c.hi
            s = _gap_sample(c_hi, c_lo)
            right.append(seifert_form_signature(V, -s))
        values = vals + [middle] + list(reversed(right))
    else:
        values = vals + [middle] + list(reversed(vals))
    return SignatureStep(tuple(jumps), tuple(values))


def litherland_sign(p: int, q: int, n: int) -> int:
    """(-1)^(floor(a/q) + floor(b/p) + floor(n/pq)) for any a, b with n = a p + b q."""
    # a p = n mod q
    a = (n * pow(p, -1, q)) % q
    b = (n - a * p) // q
    e = a // q + b // p + n // (p * q)
    return 1 if e % 2 == 0 else -1


def litherland_signature(p: int, q: int) -> SignatureStep:
    """Torus knot signature function from the jump formula."""
    from .knots import torus_alexander
    ns = [n for n in range(1, p * q) if n % p and n % q]
    D = d_k(torus_alexander(p, q))
    jumps = _jumps_from_dk(D)
    if len(jumps) != len(ns):
        raise AssertionError("torus Alexander roots do not match the Litherland jumps")
    out, vals, v = [], [0], 0
    for j, n in zip(jumps, ns):
        r = Fraction(n, p * q)
        ball = two_cos_pi(r)
        lo, hi = arb_bounds(ball)
        jj = j.c
        while jj.width > (hi - lo) * 4 and not (jj.lo < lo and hi < jj.hi):
            jj = jj.bisect()
        if hi < jj.lo or lo > jj.hi:
            raise AssertionError("jump location mismatch")
        out.append(Jump(jj, j.multiplicity, r))
        v += 2 * litherland_sign(p, q, n)
        vals.append(v)
    return SignatureStep(tuple(out), tuple(vals))


def forced_step_from_signature(delta, sigma: int, jumps: Optional[Sequence] = None) -> SignatureStep:
    """Signature function of a knot known only through Delta and sigma(-1).

    The function is determined when |sigma(-1)| equals twice the number of
    roots (with multiplicity) on alpha in (0, pi/2): then every jump has the
    sign of sigma.  Otherwise the jumps on (0, pi/2) must be given.
    """
    D = d_k(delta)
    js = _jumps_from_dk(D)
    pos = [j for j in js if j.c.lo > 0]
    tot = 2 * sum(j.multiplicity for j in pos)
    if jumps is None:
        if abs(sigma) != tot:
            raise NoSignature("signature function not determined by Delta and sigma(-1); "
                              "supply the jumps")
        s = 1 if sigma > 0 else -1
        jumps = [2 * s * j.multiplicity for j in pos]
    jumps = list(jumps)
    if len(jumps) != len(pos) or sum(jumps) != sigma:
        raise NoSignature("jump list inconsistent with Delta and sigma(-1)")
    for j, dj in zip(pos, jumps):
        if dj % 2 or abs(dj) > 2 * j.multiplicity:
            raise NoSignature("invalid jump size")
    vals = [0]
    for dj in jumps:
        vals.append(vals[-1] + dj)
    half = vals + list(reversed(vals[:-1]))
    return SignatureStep(tuple(js), tuple(half))


def signature_function(K) -> SignatureStep:
    """Dispatch on the presentation; mirror negates pointwise."""
    from .knots import Raw, Seifert, Torus, TwoBridge, alexander, seifert_matrix
    P = K.presentation
    if isinstance(P, Torus):
        sf = litherland_signature(P.p, P.q)
        if K.mirrored:
            sf = negate(sf)
        return sf
    if isinstance(P, (Seifert, TwoBridge)):
        return levine_tristram(seifert_matrix(K), delta=alexander(K))
    if isinstance(P, Raw):
        delta = alexander(K)
        if delta == LaurentPoly.const(1):
            return SignatureStep((), (0,))
        if P.signature is None:
            raise NoSignature("raw knot without signature data")
        sf = forced_step_from_signature(delta, P.signature, P.jumps)
        return negate(sf) if K.mirrored else sf
    raise NoSignature(repr(P))


def negate(sf: SignatureStep) -> SignatureStep:
    return SignatureStep(sf.jumps, tuple(-v for v in sf.values))


def signature_at_minus_one(K) -> int:
    """sigma(-1) without building the whole step function when a cheap route exists."""
    from .knots import Raw, Seifert, TwoBridge, seifert_matrix
    P = K.presentation
    if isinstance(P, (Seifert, TwoBridge)):
        return seifert_form_signature(seifert_matrix(K), None)
    if isinstance(P, Raw) and P.signature is not None:
        return -P.signature if K.mirrored else P.signature
    return signature_function(K).at_minus_one()


# ---------------------------------------------------------------------------
# partition A_K and width w_K

@dataclass(frozen=True)
class Partition:
    jumps: tuple
    alphas: tuple              # float approximations
    w_lower: Fraction          # certified lower bound for the minimal gap
    w_upper: Fraction          # and an upper bound
    w_over_pi: Optional[Fraction] = None  # exact when every breakpoint is a rational multiple of pi

    def __iter__(self):
        return iter((self.jumps, self.w_lower))


def partition_and_width(sf: SignatureStep, rel: float = 1e-6) -> Partition:
    """Breakpoints 0 < a_1 < ... < a_k < pi and a certified lower bound for w_K."""
    jumps = list(sf.jumps)
    prec = 96
    while True:
        old = ctx.prec
        ctx.prec = prec
        try:
            pi = arb.pi()
            balls = [arb(0)] + [j.alpha_ball(prec) for j in jumps] + [pi]
            gaps = [b - a for a, b in zip(balls, balls[1:])]
            lows = [arb_bounds(g)[0] for g in gaps]
            highs = [arb_bounds(g)[1] for g in gaps]
        finally:
            ctx.prec = old
        wl, wu = min(lows), min(highs)
        if wl > 0 and (wu - wl) <= Fraction(rel) * wl:
            break
        jumps = [j.refine(j.c.width / 2 ** 8) if j.alpha_over_pi is None else j for j in jumps]
        prec += 32
    alphas = tuple(j.alpha() for j in jumps)
    exact = None
    if all(j.alpha_over_pi is not None for j in jumps):
        r = [Fraction(0)] + [j.alpha_over_pi for j in jumps] + [Fraction(1)]
        exact = min(b - a for a, b in zip(r, r[1:]))
    return Partition(tuple(jumps), alphas, wl, wu, exact)


def _cyclotomic_divides(m: int, coeffs) -> bool:
    """Phi_m divides the polynomial with ascending rational ``coeffs``."""
    f = fmpq_poly([fmpq(Fraction(x).numerator, Fraction(x).denominator) for x in coeffs])
    return f.is_zero() or (f % fmpq_poly(fmpz_poly.cyclotomic(m).coeffs())).is_zero()


def root_of_unity_in_dk(delta, r: Fraction) -> bool:
    """Whether e^{2 pi i r} is a root of Delta (exact cyclotomic divisibility)."""
    r = Fraction(r) % 1
    d = as_laurent(delta)
    return _cyclotomic_divides(r.denominator, d.shift(-d.low).as_ordinary())


def two_cos_pi_is_root(poly, r: Fraction) -> bool:
    """Whether 2cos(pi r) is a root of the dense polynomial ``poly``.

    With c = u + 1/u, u^d P(u + 1/u) vanishes at u = e^{i pi r} iff the
    cyclotomic polynomial of that root of unity divides it.
    """
    a = [Fraction(x) for x in poly]
    d = len(a) - 1
    s = LaurentPoly.monomial(1) + LaurentPoly.monomial(-1)
    H, pw = LaurentPoly(), LaurentPoly.const(1)
    for coef in a:
        H = H + pw * coef
        pw = pw * s
    H = H.shift(d)
    m = (Fraction(r) / 2 % 1).denominator
    return _cyclotomic_divides(m, H.as_ordinary())


def compare_two_cos_pi(c: AlgebraicReal, r: Fraction, delta=None) -> int:
    """Sign of c - 2cos(pi r) for an element c of D_K.

    When Delta is supplied equality is decided exactly: 2cos(pi r) lies in D_K
    iff a cyclotomic factor divides Delta, and the isolating interval of c
    contains no other element of D_K.
    """
    r = Fraction(r)
    hit = None  # the exact test is only needed when the intervals keep overlapping
    prec = 64
    cc = c
    while True:
        lo, hi = arb_bounds(two_cos_pi(r, prec))
        if cc.hi < lo:
            return -1
        if cc.lo > hi:
            return 1
        if hit is None and prec >= 256:
            hit = root_of_unity_in_dk(delta, r) if delta is not None else two_cos_pi_is_root(c.poly, r)
        if hit and c.lo < lo and hi < c.hi:
            return 0
        if prec > 1 << 14:
            raise OnJump("cannot separate 2cos(pi r) from an element of D_K")
        cc = cc.refine(max(cc.width / 16, hi - lo))
        prec *= 2
