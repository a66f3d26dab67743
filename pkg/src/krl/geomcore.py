"""Matrix identities behind the geometric transition from SU(2) to SL2R.

For a real parameter t the quadric Q_t = {t(x^2 + y^2) + z^2 = 1} is
identified with a conjugacy class in U_t via

    phi_t(x, y, z) = i [[z, -(x + i y)], [-t (x - i y), -z]],

and A(alpha, t, v) = cos(alpha) I + sin(alpha) phi_t(v).  t = 1 is SU(2),
t = -1 is (a conjugate of) SU(1,1) = SL2R, and t = 0 is the degenerate wall.
Floats (numpy) are used for the identity sweeps; the forms L, B and the
q-determinants are exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import NotCharacterOfSphere, NotOnQuadric, WrongChart
from .poly import LaurentPoly, cyclotomic

QUADRIC_TOL = 1e-12
UT_TOL = 1e-10


def quadric(t: float, v) -> float:
    x, y, z = v
    return t * (x * x + y * y) + z * z


def _check_quadric(t, v, tol=QUADRIC_TOL):
    r = quadric(t, v) - 1
    if abs(r) > tol:
        raise NotOnQuadric(f"B_t(v) - 1 = {r:.3g}")


# ---------------------------------------------------------------------------
# Lie data

def phi(t: float, v) -> np.ndarray:
    x, y, z = v
    return 1j * np.array([[z, -(x + 1j * y)], [-t * (x - 1j * y), -z]], dtype=complex)


def phi_inv(t: float, M, check: float = 1e-8):
    """Inverse of phi_t on its image; the real 3-vector v with phi_t(v) = M."""
    w = 1j * M[0, 1]            # x + i y
    z = (-1j * M[0, 0]).real
    if check is not None:
        resid = abs(M[0, 0] + M[1, 1]) + abs((-1j * M[0, 0]).imag)
        resid += abs(M[1, 0] - 1j * (-t * w.conjugate()))
        if resid > check * (1 + np.abs(M).max()):
            raise ValueError(f"matrix is not in the image of phi_t (residual {resid:.3g})")
    return np.array([w.real, w.imag, z])


def is_ut(t: float, g, tol=UT_TOL) -> bool:
    a, b = g[0, 0], g[0, 1]
    return (abs(g[1, 0] + t * b.conjugate()) < tol and abs(g[1, 1] - a.conjugate()) < tol
            and abs(abs(a) ** 2 + t * abs(b) ** 2 - 1) < tol)


def ut_element(t: float, a: complex, b: complex) -> np.ndarray:
    return np.array([[a, b], [-t * b.conjugate(), a.conjugate()]], dtype=complex)


def act(t: float, g, v) -> np.ndarray:
    """g . v = phi_t^{-1}(g phi_t(v) g^{-1})."""
    return phi_inv(t, g @ phi(t, v) @ np.linalg.inv(g))


def dilate(u: complex, v) -> np.ndarray:
    """u . (x, y, z): multiply x + i y by u."""
    w = u * complex(v[0], v[1])
    return np.array([w.real, w.imag, v[2]])


def t_u(u: complex) -> np.ndarray:
    return np.diag([u, 1]).astype(complex)


def matrix_a(alpha: float, t: float, v, check: bool = True) -> np.ndarray:
    if check:
        _check_quadric(t, v, 1e-9)
    return math.cos(alpha) * np.eye(2, dtype=complex) + math.sin(alpha) * phi(t, v)


def exp_series(M, terms: int = 80) -> np.ndarray:
    """exp(M) by direct summation of the power series."""
    out = np.eye(M.shape[0], dtype=complex)
    term = np.eye(M.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ M / k
        out = out + term
        if np.abs(term).max() < 1e-18:
            break
    return out


# ---------------------------------------------------------------------------
# configurations, holonomy, braid action

@dataclass
class ConfigPoint:
    t: float
    vs: np.ndarray  # shape (n, 3)

    def __post_init__(self):
        self.vs = np.asarray(self.vs, dtype=float)

    @property
    def n(self) -> int:
        return len(self.vs)

    def validate(self, tol=QUADRIC_TOL):
        for v in self.vs:
            _check_quadric(self.t, v, tol)
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                if not (np.allclose(self.vs[i], self.vs[j]) or np.allclose(self.vs[i], -self.vs[j])):
                    return self
        raise ValueError("all points coincide up to sign")


def random_quadric_point(rng: np.random.Generator, t: float, sign: Optional[int] = None):
    """A point of Q_t; z has the given sign when supplied."""
    if t > 0:
        while True:
            u = rng.normal(size=3)
            u /= np.linalg.norm(u)
            v = np.array([u[0] / math.sqrt(t), u[1] / math.sqrt(t), u[2]])
            if sign is None or np.sign(v[2]) == sign:
                return v
            v[2] = -v[2]
            return v
    x, y = rng.normal(size=2)
    z = math.sqrt(1 - t * (x * x + y * y))
    s = sign if sign is not None else (1 if rng.random() < 0.5 else -1)
    return np.array([x, y, s * z])


def random_config(rng, n: int, t: float, eps: Optional[Sequence[int]] = None) -> ConfigPoint:
    vs = [random_quadric_point(rng, t, None if eps is None else eps[i]) for i in range(n)]
    return ConfigPoint(t, np.array(vs))


def random_ut(rng, t: float) -> np.ndarray:
    if t > 0:
        r = rng.random() * 0.95 / math.sqrt(t)
    else:
        r = rng.random()
    b = r * cmath.exp(2j * math.pi * rng.random())
    a = math.sqrt(1 - t * r * r) * cmath.exp(2j * math.pi * rng.random())
    return ut_element(t, a, b)


def holonomy_f(alpha: float, cfg: ConfigPoint) -> np.ndarray:
    F = np.eye(2, dtype=complex)
    for v in cfg.vs:
        F = F @ matrix_a(alpha, cfg.t, v)
    return F


def braid_act(i: int, alpha: float, cfg: ConfigPoint) -> ConfigPoint:
    """The generator sigma_i (0-based: swaps positions i, i+1).

    (.., v_i, v_{i+1}, ..) -> (.., v_{i+1}, A_{i+1}^{-1} . v_i, ..).
    """
    vs = cfg.vs.copy()
    A = matrix_a(alpha, cfg.t, vs[i + 1])
    vi = act(cfg.t, np.linalg.inv(A), vs[i])
    vs[i], vs[i + 1] = vs[i + 1].copy(), vi
    return ConfigPoint(cfg.t, vs)


def braid_act_inverse(i: int, alpha: float, cfg: ConfigPoint) -> ConfigPoint:
    """(.., a, b, ..) -> (.., A(a) . b, a, ..)."""
    vs = cfg.vs.copy()
    A = matrix_a(alpha, cfg.t, vs[i])
    new = act(cfg.t, A, vs[i + 1])
    vs[i + 1], vs[i] = vs[i].copy(), new
    return ConfigPoint(cfg.t, vs)


def apply_braid(word: Sequence[int], alpha: float, cfg: ConfigPoint) -> ConfigPoint:
    """Letters +(i+1) for sigma_i and -(i+1) for its inverse."""
    for a in word:
        cfg = braid_act(a - 1, alpha, cfg) if a > 0 else braid_act_inverse(-a - 1, alpha, cfg)
    return cfg


# ---------------------------------------------------------------------------
# the normalizing isometry

def gram_t(t: float) -> np.ndarray:
    return np.diag([t, t, 1.0])


def normalize_w(t: float, v) -> np.ndarray:
    """An isometry of B_t taking e_3 to v (z > 0)."""
    x, y, z = v
    _check_quadric(t, v, 1e-9)
    if z <= 0:
        raise NotOnQuadric("normalize_w needs z > 0")
    d = 1 + z
    return np.array([[1 - t * x * x / d, -t * x * y / d, x],
                     [-t * x * y / d, 1 - t * y * y / d, y],
                     [-t * x, -t * y, z]])


def gram_residual(t: float, W) -> float:
    G = gram_t(t)
    return float(np.abs(W.T @ G @ W - G).max())


# ---------------------------------------------------------------------------
# the forms L and B at t = 0, exactly as exponents of zeta = e^{i alpha}

@dataclass(frozen=True)
class FormsLB:
    """c_j = zeta^{c_exp[j]} and b_jk = zeta^{b_exp[j][k]} (k < j), zeta = e^{i alpha}."""

    eps: tuple
    c_exp: tuple
    b_exp: tuple
    alpha: float

    @property
    def n(self):
        return len(self.eps)

    def c(self) -> np.ndarray:
        z = cmath.exp(1j * self.alpha)
        return np.array([z ** e for e in self.c_exp])

    def b_matrix(self) -> np.ndarray:
        """Matrix M with B(w) = conj(w)^T M w."""
        n, a = self.n, self.alpha
        s = math.sin(a)
        z = cmath.exp(1j * a)
        M = np.zeros((n, n), dtype=complex)
        for j in range(n):
            M[j, j] = s * (-0.5j * self.eps[j]) * z ** (-self.eps[j])
            for k in range(j):
                M[j, k] = -s * s * z ** self.b_exp[j][k]
        return M

    def L(self, w) -> complex:
        return complex(self.c() @ np.asarray(w))

    def B(self, w) -> complex:
        w = np.asarray(w, dtype=complex)
        return complex(w.conj() @ self.b_matrix() @ w)

    def H(self, w) -> float:
        """-i B(w); real on ker L."""
        return (-1j * self.B(w)).real


def _balanced(eps, alpha, alpha_over_pi) -> bool:
    s = sum(eps)
    if s == 0:
        return True
    if alpha_over_pi is not None:
        return (Fraction(alpha_over_pi) * s / 2).denominator == 1
    return abs(cmath.exp(1j * alpha * s) - 1) < 1e-12


def forms_lb(alpha: float, eps: Sequence[int], n: Optional[int] = None,
             alpha_over_pi: Optional[Fraction] = None) -> FormsLB:
    eps = tuple(int(e) for e in eps)
    if n is not None and n != len(eps):
        raise ValueError("n must equal len(eps)")
    if any(e not in (1, -1) for e in eps):
        raise ValueError("signs must be +-1")
    if alpha_over_pi is not None:
        alpha = float(Fraction(alpha_over_pi)) * math.pi
    if not _balanced(eps, alpha, alpha_over_pi):
        raise NotCharacterOfSphere("prod zeta_l != 1")
    n = len(eps)
    pre = [0]
    for e in eps:
        pre.append(pre[-1] + e)
    tot = pre[-1]
    c = tuple(pre[j] - (tot - pre[j + 1]) for j in range(n))
    b = tuple(tuple(eps[j] + eps[k] - 2 * (pre[j + 1] - pre[k]) for k in range(j)) for j in range(n))
    return FormsLB(eps, c, b, alpha)


def kernel_quotient_basis(F: FormsLB) -> np.ndarray:
    """Orthonormal basis (columns) of ker L intersected with the orthogonal complement of eps."""
    c = F.c()
    e = np.array(F.eps, dtype=complex)
    if abs(c @ e) > 1e-9:
        raise ValueError("eps is not in ker L")
    A = np.vstack([c, e.conj()])
    _, s, vh = np.linalg.svd(A)
    return vh[2:].conj().T


def hermitian_restricted(F: FormsLB) -> np.ndarray:
    """Matrix of H = -iB on ker L / <eps>."""
    Q = kernel_quotient_basis(F)
    M = -1j * F.b_matrix()
    Hm = Q.conj().T @ M @ Q
    return (Hm + Hm.conj().T) / 2


def hermitian_inertia_numeric(F: FormsLB, tol: float = 1e-9):
    ev = np.linalg.eigvalsh(hermitian_restricted(F))
    return int((ev < -tol).sum()), int((ev > tol).sum()), int((abs(ev) <= tol).sum())


def hpp_inertia_numeric(n: int, k: int, tol: float = 1e-9):
    """(negative, positive, zero) of H'' = (-2/sin alpha) H' for eps = 1, alpha = 2 pi k / n."""
    F = forms_lb(0.0, [1] * n, alpha_over_pi=Fraction(2 * k, n))
    M = (-2 / math.sin(F.alpha)) * hermitian_restricted(F)
    ev = np.linalg.eigvalsh(M)
    return int((ev < -tol).sum()), int((ev > tol).sum()), int((abs(ev) <= tol).sum())


# ---------------------------------------------------------------------------
# the tridiagonal matrices J_m and W

def det_j(m: int) -> LaurentPoly:
    """det of the m x m tridiagonal matrix with q + 1/q on the diagonal, -q above, -1/q below."""
    if m < 1:
        raise ValueError("m >= 1")
    q = LaurentPoly.monomial(1)
    qi = LaurentPoly.monomial(-1)
    prev, cur = LaurentPoly.const(1), q + qi
    for _ in range(m - 1):
        prev, cur = cur, (q + qi) * cur - prev
    return cur


def det_j_closed(m: int) -> LaurentPoly:
    """(q^{m+1} - q^{-(m+1)}) / (q - q^{-1}) = sum of q^j, j = -m, -m+2, ..., m."""
    return LaurentPoly({j: 1 for j in range(-m, m + 1, 2)})


def w_matrix(alpha: float, N: int) -> np.ndarray:
    z = cmath.exp(1j * alpha)
    W = np.zeros((N, N), dtype=complex)
    for i in range(N):
        W[i, i] = 2 * math.cos(alpha)
        if i + 1 < N:
            W[i, i + 1] = -z
            W[i + 1, i] = -1 / z
    return W


def _sin_sign(r: Fraction) -> int:
    """Sign of sin(pi r)."""
    r = r % 2
    if r == 0 or r == 1:
        return 0
    return 1 if r < 1 else -1


def leading_minor_signs(n: int, k: int) -> list:
    """Signs of D_0, ..., D_{n-2} for W at alpha = 2 pi k / n, D_m = sin((m+1) alpha) / sin(alpha)."""
    a = Fraction(2 * k, n)
    s0 = _sin_sign(a)
    return [_sin_sign((m + 1) * a) * s0 for m in range(n - 1)]


def hermitian_index(n: int, k: int) -> int:
    """Negative eigenvalues of W ((n-2) x (n-2)) at zeta = e^{2 pi i k / n}, exactly.

    Counted by sign changes of the leading principal minors when none
    vanishes; otherwise from the closed spectrum 2cos(alpha) - 2cos(j pi/(n-1)).
    """
    if not 1 <= k < Fraction(n, 2):
        raise ValueError("need 1 <= k < n/2")
    N = n - 2
    signs = leading_minor_signs(n, k)
    if all(s != 0 for s in signs[:N]):
        return sum(1 for a, b in zip(signs[:N], signs[1:N + 1]) if a != b)
    # eigenvalue 2cos(alpha) - 2cos(j pi/(N+1)) is negative iff j/(N+1) < 2k/n
    return sum(1 for j in range(1, N + 1) if Fraction(j, N + 1) < Fraction(2 * k, n))


def det_w(n: int, k: int):
    """det W at zeta = e^{2 pi i k/n}, exactly in Q(zeta): det J_{n-2} reduced mod the cyclotomic polynomial.

    Returns the element as a tuple of rational coefficients in powers of zeta
    (lowest first); (-1,) means det W = -1.
    """
    m = n // math.gcd(n, k)
    N = n - 2
    P = LaurentPoly()
    for e, c in det_j(N).items():
        P = P + LaurentPoly.monomial((e * k // math.gcd(n, k)) % m, c)
    phi_m = cyclotomic(m)
    r = _poly_mod(P, phi_m)
    while r and r[-1] == 0:
        r.pop()
    return tuple(r)


def _poly_mod(P: LaurentPoly, D: LaurentPoly) -> list:
    a = [Fraction(x) for x in P.as_ordinary()] if P else []
    d = [Fraction(x) for x in D.as_ordinary()]
    while len(a) >= len(d):
        c = a[-1] / d[-1]
        shift = len(a) - len(d)
        for i, x in enumerate(d):
            a[shift + i] -= c * x
        a.pop()
    return a


# ---------------------------------------------------------------------------
# resolution functions

def config_from_omega(t: float, omegas: Sequence[complex], eps: Sequence[int]) -> ConfigPoint:
    """Points with omega = y - i x and z = eps sqrt(1 - t |omega|^2)."""
    vs = []
    for w, e in zip(omegas, eps):
        r2 = abs(w) ** 2
        if 1 - t * r2 < 0:
            raise WrongChart("point leaves the chart")
        vs.append([-w.imag, w.real, e * math.sqrt(1 - t * r2)])
    return ConfigPoint(t, np.array(vs))


def omegas_of(cfg: ConfigPoint) -> np.ndarray:
    return np.array([complex(v[1], -v[0]) for v in cfg.vs])


def f_epsilon(alpha: float, eps: Sequence[int], cfg: ConfigPoint):
    """(F_12, Im(F_11 - 1)/t); at t = 0 the second entry is Im B(omega)."""
    eps = tuple(eps)
    if any(np.sign(v[2]) != e for v, e in zip(cfg.vs, eps)):
        raise WrongChart("sign(z_i) != eps_i")
    F = holonomy_f(alpha, cfg)
    if F[0, 0].real <= 0:
        raise WrongChart("Re F_11 <= 0")
    if cfg.t == 0:
        FL = forms_lb(alpha, eps)
        return complex(F[0, 1]), FL.B(omegas_of(cfg)).imag
    return complex(F[0, 1]), float((F[0, 0] - 1).imag / cfg.t)


# ---------------------------------------------------------------------------
# the trefoil

@dataclass(frozen=True)
class TrefoilSlice:
    x: np.ndarray
    y: np.ndarray
    mu: np.ndarray
    trace: float
    expected: float

    @property
    def residual(self) -> float:
        return abs(self.trace - self.expected)


def trefoil_slice(theta_sign: int, phi_sign: int, s: float) -> TrefoilSlice:
    """rho(x) rotation by theta = +-pi/2, rho(y) fixing s i with angle phi = +-pi/3."""
    if s < 1:
        raise ValueError("s >= 1")
    th, ph = theta_sign * math.pi / 2, phi_sign * math.pi / 3
    x = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    y = np.array([[math.cos(ph), -s * math.sin(ph)], [math.sin(ph) / s, math.cos(ph)]])
    f = x @ x
    if np.abs(f - np.linalg.matrix_power(y, 3)).max() > 1e-12:
        raise AssertionError("x^2 != y^3")
    mu = x @ y @ np.linalg.inv(f)
    tr = float(np.trace(mu))
    expected = theta_sign * phi_sign * math.sqrt(3) / 2 * (s + 1 / s)
    return TrefoilSlice(x, y, mu, tr, expected)


def trefoil_plat_configuration(alpha: float, t: float = -1.0) -> ConfigPoint:
    """(a, -a, b, -b) fixed by sigma_2^3: the caps of the plat closure of the trefoil.

    sigma^2 acts on a pair (u, b) by conjugation by (A_u A_b)^{-1}, so sigma^3
    fixes it iff A_u A_b A_u = A_b A_u A_b, i.e. tr(A_u A_b) = 1.  With
    b = e_3 this reads B_t(u, e_3) = cos(2 alpha)/(2 sin^2 alpha); for
    alpha < pi/6 the solution needs t < 0.
    """
    z = math.cos(2 * alpha) / (2 * math.sin(alpha) ** 2)
    x2 = (1 - z * z) / t
    if x2 < 0:
        raise WrongChart("no such configuration for this sign of t")
    u = np.array([math.sqrt(x2), 0.0, z])
    b = np.array([0.0, 0.0, 1.0])
    return ConfigPoint(t, np.array([-u, u, b, -b]))


# ---------------------------------------------------------------------------
# the identity suite

def sample_rng(seed: int, i: int) -> np.random.Generator:
    """Independent stream for sample i; reproducible regardless of how samples are split."""
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, int(i), 0, 0]))


def _random_t(rng) -> float:
    s = 1 if rng.random() < 0.5 else -1
    return s * float(rng.uniform(0.2, 2.0))


def _sample_residuals(seed: int, i: int) -> dict:
    rng = sample_rng(seed, i)
    t = _random_t(rng)
    a = float(rng.uniform(0.05, math.pi - 0.05))
    n = int(rng.integers(2, 7))
    v = random_quadric_point(rng, t)
    A = matrix_a(a, t, v)
    cfg = random_config(rng, n, t)
    F = holonomy_f(a, cfg)
    g = random_ut(rng, t)
    gi = np.linalg.inv(g)
    cg = ConfigPoint(t, np.array([act(t, g, w) for w in cfg.vs]))
    u = complex(*rng.normal(size=2))
    while abs(u) < 0.2:
        u = complex(*rng.normal(size=2))
    T = t_u(u)
    cd = ConfigPoint(t / abs(u) ** 2, np.array([dilate(u, w) for w in cfg.vs]))
    k = int(rng.integers(0, n - 1))
    cb = braid_act(k, a, cfg)
    vp = random_quadric_point(rng, t, 1)
    W = normalize_w(t, vp)
    Wi = normalize_w(t, [-vp[0], -vp[1], vp[2]])
    return {
        "trace": float(abs(np.trace(A) - 2 * math.cos(a))),
        "inverse": float(np.abs(matrix_a(a, t, -v) @ A - np.eye(2)).max()),
        "exp_series": float(np.abs(exp_series(a * phi(t, v)) - A).max()),
        "ut_equivariance": float(np.abs(holonomy_f(a, cg) - g @ F @ gi).max()),
        "dilation": float(np.abs(holonomy_f(a, cd) - T @ F @ np.linalg.inv(T)).max()),
        "braid_invariance": float(np.abs(holonomy_f(a, cb) - F).max()),
        "braid_inverse": float(np.abs(braid_act_inverse(k, a, cb).vs - cfg.vs).max()),
        "w_gram": gram_residual(t, W) + float(np.abs(W[:, 2] - vp).max())
        + float(np.abs(W @ Wi - np.eye(3)).max()),
    }


IDENTITY_TOLERANCES = {
    "trace": 1e-9, "inverse": 1e-9, "exp_series": 1e-12, "ut_equivariance": 1e-9,
    "dilation": 1e-9, "braid_invariance": 1e-9, "braid_inverse": 1e-9, "w_gram": 1e-9,
    "trefoil_slice": 1e-10,
}


@dataclass(frozen=True)
class IdentityResult:
    name: str
    samples: int
    max_residual: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.max_residual < self.tolerance

    def to_json(self):
        return {"identity": self.name, "samples": self.samples, "max_residual": float(self.max_residual),
                "tolerance": self.tolerance, "pass": bool(self.ok)}


def verify_identities(samples: int = 1000, seed: int = 0, workers: int = 1) -> list:
    """Max residual of every identity over ``samples`` seeded samples."""
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as ex:
            rows = list(ex.map(_sample_residuals, [seed] * samples, range(samples), chunksize=64))
    else:
        rows = [_sample_residuals(seed, i) for i in range(samples)]
    out = []
    for name in rows[0]:
        out.append(IdentityResult(name, samples, max(r[name] for r in rows), IDENTITY_TOLERANCES[name]))
    tre = 0.0
    for i in range(samples):
        rng = sample_rng(seed, samples + i)
        s = 1 + float(rng.exponential(2.0))
        for sg in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            tre = max(tre, trefoil_slice(*sg, s).residual)
    out.append(IdentityResult("trefoil_slice", samples, tre, IDENTITY_TOLERANCES["trefoil_slice"]))
    return out
