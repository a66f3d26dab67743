import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from krl.errors import NotCharacterOfSphere, NotOnQuadric, WrongChart
from krl.geomcore import (IDENTITY_TOLERANCES, act, apply_braid, braid_act, braid_act_inverse,
                          config_from_omega, det_j, det_j_closed, det_w, exp_series, f_epsilon,
                          forms_lb, gram_residual, hermitian_index, hermitian_inertia_numeric,
                          holonomy_f, hpp_inertia_numeric, is_ut, matrix_a, normalize_w, phi,
                          phi_inv, quadric, random_config, random_quadric_point, random_ut,
                          sample_rng, trefoil_plat_configuration, trefoil_slice, verify_identities,
                          w_matrix)
from krl.poly import LaurentPoly

Q = sympy.symbols("q")

t_val = st.floats(0.2, 2.0).flatmap(lambda x: st.sampled_from([x, -x]))
alpha = st.floats(0.05, math.pi - 0.05)


def _laurent_coeffs(e):
    e = sympy.expand(e * Q ** 20)
    P = sympy.Poly(e, Q)
    return {k[0] - 20: c for k, c in zip(P.monoms(), P.coeffs())}


def test_quadric_and_phi():
    v = np.array([0.3, 0.4, math.sqrt(1 - 0.5 * 0.25)])
    assert abs(quadric(0.5, v) - 1) < 1e-15
    assert np.allclose(phi_inv(0.5, phi(0.5, v)), v)
    with pytest.raises(NotOnQuadric):
        matrix_a(0.3, 0.5, [1.0, 1.0, 1.0])


@settings(max_examples=40)
@given(t_val, alpha, st.integers(0, 10 ** 6))
def test_matrix_a_identities(t, a, seed):
    rng = np.random.default_rng(seed)
    v = random_quadric_point(rng, t)
    A = matrix_a(a, t, v)
    assert abs(np.trace(A) - 2 * math.cos(a)) < 1e-9
    assert np.allclose(matrix_a(a, t, -v) @ A, np.eye(2), atol=1e-9)
    assert np.allclose(exp_series(a * phi(t, v)), A, atol=1e-12)
    g = random_ut(rng, t)
    assert is_ut(t, g)
    assert np.allclose(matrix_a(a, t, act(t, g, v)), g @ A @ np.linalg.inv(g), atol=1e-9)


@settings(max_examples=30)
@given(t_val, alpha, st.integers(3, 6), st.integers(0, 10 ** 6))
def test_braid_invariance(t, a, n, seed):
    rng = np.random.default_rng(seed)
    cfg = random_config(rng, n, t)
    F = holonomy_f(a, cfg)
    for i in range(n - 1):
        c = braid_act(i, a, cfg)
        assert np.allclose(holonomy_f(a, c), F, atol=1e-9)
        assert np.allclose(braid_act_inverse(i, a, c).vs, cfg.vs, atol=1e-9)


def test_braid_word_inverse():
    rng = sample_rng(3, 0)
    cfg = random_config(rng, 4, -0.7)
    back = apply_braid([-1, -2, 3], 1.1, apply_braid([-3, 2, 1], 1.1, cfg))
    assert np.allclose(back.vs, cfg.vs, atol=1e-9)


@given(t_val, st.integers(0, 10 ** 6))
def test_normalize_w(t, seed):
    rng = np.random.default_rng(seed)
    v = random_quadric_point(rng, t, 1)
    W = normalize_w(t, v)
    assert gram_residual(t, W) < 1e-9
    assert np.allclose(W[:, 2], v)


def test_normalize_w_needs_upper_sheet():
    with pytest.raises(NotOnQuadric):
        normalize_w(-1.0, [0.0, 0.0, -1.0])


@pytest.mark.parametrize("m", range(1, 13))
def test_det_j_closed_form(m):
    assert det_j(m) == det_j_closed(m)


@pytest.mark.parametrize("m", [1, 2, 5, 8])
def test_det_j_sympy(m):
    assert det_j(m) == LaurentPoly({k: int(v) for k, v in _laurent_coeffs(
        _sympy_det(m)).items()})


def _sympy_det(m):
    M = sympy.zeros(m, m)
    for i in range(m):
        M[i, i] = Q + 1 / Q
        if i + 1 < m:
            M[i, i + 1] = -Q
            M[i + 1, i] = -1 / Q
    return sympy.expand(M.det(method="berkowitz"))


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8, 9, 10, 11, 12])
def test_hermitian_index_matches_numeric(n):
    for k in range(1, n):
        if 2 * k >= n:
            break
        a = 2 * math.pi * k / n
        ev = np.linalg.eigvalsh(w_matrix(a, n - 2))
        assert hermitian_index(n, k) == int((ev < -1e-9).sum())
        neg, pos, zero = hpp_inertia_numeric(n, k)
        assert neg == hermitian_index(n, k)


@pytest.mark.parametrize("n", [4, 6, 8, 10, 12])
def test_hpp_even_pattern(n):
    for k in range(1, n // 2):
        assert hermitian_index(n, k) == 2 * k - 1


def test_n5_definite():
    assert hermitian_index(5, 2) == 3
    assert hpp_inertia_numeric(5, 2) == (3, 0, 0)


def test_det_w_minus_one():
    for n, k in [(5, 1), (5, 2), (6, 1), (12, 5)]:
        assert det_w(n, k) == (Fraction(-1),)


@settings(max_examples=50)
@given(st.integers(1, 5), alpha, st.randoms(use_true_random=False))
def test_balanced_index(m, a, r):
    eps = [1] * m + [-1] * m
    r.shuffle(eps)
    F = forms_lb(a, eps)
    assert hermitian_inertia_numeric(F) == (m - 1, m - 1, 0)


def test_forms_requires_balance():
    with pytest.raises(NotCharacterOfSphere):
        forms_lb(0.7, [1, 1, 1])
    F = forms_lb(0.0, [1, 1, 1], alpha_over_pi=Fraction(2, 3))
    assert F.n == 3


def test_f_epsilon_limit():
    rng = np.random.default_rng(1)
    a, eps = 0.8, [1, -1, 1, -1]
    om = 0.3 * rng.normal(size=4) + 0.3j * rng.normal(size=4)
    f12, imb = f_epsilon(a, eps, config_from_omega(0.0, om, eps))
    assert abs(f12 - math.sin(a) * forms_lb(a, eps).L(om)) < 1e-12
    for t in (1e-5, -1e-5):
        g12, img = f_epsilon(a, eps, config_from_omega(t, om, eps))
        assert abs(g12 - f12) < 1e-5 and abs(img - imb) < 1e-5


def test_f_epsilon_wrong_chart():
    om = np.array([0.1 + 0.1j, 0.2j])
    cfg = config_from_omega(0.5, om, [1, -1])
    with pytest.raises(WrongChart):
        f_epsilon(0.5, [1, 1], cfg)


@given(st.sampled_from([1, -1]), st.sampled_from([1, -1]), st.floats(1.0, 50.0))
def test_trefoil_slice(ts, ps, s):
    assert trefoil_slice(ts, ps, s).residual < 1e-10


def test_trefoil_plat():
    for a in (0.2, 0.3, 0.5):
        cfg = trefoil_plat_configuration(a)
        assert np.abs(apply_braid([2, 2, 2], a, cfg).vs - cfg.vs).max() < 1e-10
        assert np.abs(apply_braid([2], a, cfg).vs - cfg.vs).max() > 1e-3
    with pytest.raises(WrongChart):
        trefoil_plat_configuration(0.3, t=1.0)


def test_identity_suite_small():
    res = verify_identities(samples=100, seed=7)
    assert {r.name for r in res} == set(IDENTITY_TOLERANCES)
    assert all(r.ok for r in res)


def test_identity_suite_reproducible_across_workers():
    a = verify_identities(samples=64, seed=2, workers=1)
    b = verify_identities(samples=64, seed=2, workers=2)
    assert [r.max_residual for r in a] == [r.max_residual for r in b]
