import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from krl import mirror, raw, seifert, torus, two_bridge
from krl.errors import NoSignature, OnJump
from krl.knots import seifert_matrix, torus_alexander
from krl.poly import LaurentPoly
from krl.signatures import (compare_two_cos_pi, d_k, forced_step_from_signature, hermitian_signature,
                            ldl_inertia, levine_tristram, litherland_signature, negate, partition_and_width,
                            root_of_unity_in_dk, signature_at_minus_one, signature_function,
                            symmetric_signature, two_cos_pi_is_root)


def numpy_signature(V, alpha):
    """Reference: signature of (1 - w) V + (1 - conj w) V^T at w = e^{2 i alpha}."""
    V = np.array(V, dtype=float)
    w = np.exp(2j * alpha)
    M = (1 - w) * V + (1 - np.conj(w)) * V.T
    ev = np.linalg.eigvalsh(M)
    assert np.min(np.abs(ev)) > 1e-9
    return int((ev > 0).sum() - (ev < 0).sum())


def interval_midpoints(sf):
    a = [0.0] + [j.alpha() for j in sf.jumps] + [math.pi]
    return [(x + y) / 2 for x, y in zip(a, a[1:])]


# frozen: unit-circle root arguments alpha = arg(t)/2 of the printed K15a78855
# polynomial, from numpy.roots
K15_ALPHAS = (0.139311890213, 0.3980185953, 0.963372021093,
              2.178220632497, 2.743574058290, 3.002280763377)


def test_trefoil_signature_function():
    sf = signature_function(torus(2, 3))
    assert sf.values == (0, -2, 0)
    assert [j.alpha_over_pi for j in sf.jumps] == [Fraction(1, 6), Fraction(5, 6)]
    lo, hi = sf.jumps[0].alpha_interval(Fraction(1, 10 ** 10))
    assert hi - lo < Fraction(1, 10 ** 9)
    assert abs(float(lo) - math.pi / 6) < 1e-12 and abs(float(hi) - math.pi / 6) < 1e-12


def test_trefoil_dk():
    D = d_k("t-1+t^-1")
    assert len(D) == 2
    assert abs(D.values()[1] - math.sqrt(3)) < 1e-12
    assert not D.contains(1)


def test_k15_partition(k15):
    sf = signature_function(k15)
    assert sf.half_values == (0, -1, -2, -3, -2, -1, 0)
    P = partition_and_width(sf)
    for a, b in zip(P.alphas, K15_ALPHAS):
        assert abs(a - b) < 1e-9


def test_torus_jump_values():
    assert litherland_signature(3, 4).values == (0, -2, -4, -6, -4, -2, 0)
    assert litherland_signature(2, 5).values == (0, -2, -4, -2, 0)


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_litherland_equals_levine_tristram(q):
    a = litherland_signature(2, q)
    b = levine_tristram(seifert_matrix(torus(2, q)), full=True)
    assert a.values == b.values
    for x, y in zip(a.jumps, b.jumps):
        assert x.c.compare_to(y.c) == 0


KNOTS = [seifert([[-1, 1], [0, -1]]), seifert([[1, 1], [0, -1]]), torus(2, 7),
         two_bridge(7, 2), two_bridge(13, 5), two_bridge(25, 7), two_bridge(41, 9),
         seifert([[-1, 1, 0, 0], [0, -1, 0, 0], [0, 0, -1, 1], [0, 0, 0, -1]])]


@pytest.mark.parametrize("K", KNOTS, ids=lambda K: K.label())
def test_against_numpy_eigenvalues(K):
    V = seifert_matrix(K)
    sf = levine_tristram(V, full=True)
    for v, a in zip(sf.values, interval_midpoints(sf)):
        assert v == numpy_signature(V, a)


@settings(max_examples=40)
@given(st.integers(1, 20).map(lambda k: 2 * k + 1).flatmap(
    lambda p: st.tuples(st.just(p), st.integers(1, p - 1).filter(lambda q: math.gcd(p, q) == 1))))
def test_c_symmetry(pq):
    # sigma(alpha) = sigma(pi - alpha): values are palindromic and D_K is symmetric under c -> -c
    K = two_bridge(*pq)
    sf = levine_tristram(seifert_matrix(K), full=True)
    assert sf.values == sf.values[::-1]
    cs = sorted(float(j.c) for j in sf.jumps)
    assert np.allclose(cs, [-x for x in reversed(cs)], atol=1e-12)


@given(st.sampled_from(KNOTS + [torus(3, 4), torus(2, 5)]))
def test_mirror_negates(K):
    a = signature_function(K)
    b = signature_function(mirror(K))
    if K.kind in ("torus", "raw"):
        assert b.values == tuple(-v for v in a.values)
    assert negate(negate(a)) == a


def test_mirror_seifert():
    V = [[-1, 1], [0, -1]]
    Vm = [[-x for x in r] for r in zip(*V)]  # -V^T presents the mirror
    assert levine_tristram(Vm).values == (0, 2, 0)


def test_signature_at_minus_one(k15):
    assert signature_at_minus_one(k15) == -6
    assert signature_at_minus_one(mirror(k15)) == 6
    assert signature_at_minus_one(two_bridge(5, 2)) == 0


def test_forced_step_needs_jumps():
    d = torus_alexander(3, 4)
    with pytest.raises(NoSignature):
        forced_step_from_signature(d, -2)
    # three roots on (0, pi/2), at alpha/pi = 1/12, 2/12, 5/12
    assert forced_step_from_signature(d, -2, jumps=[-2, -2, 2]).values == (0, -2, -4, -2, -4, -2, 0)
    with pytest.raises(NoSignature):
        forced_step_from_signature(d, -2, jumps=[-2, 0])


def test_raw_without_signature():
    with pytest.raises(NoSignature):
        signature_function(raw("t-1+t^-1"))


def test_value_on_jump_raises():
    sf = signature_function(two_bridge(5, 1))
    with pytest.raises(OnJump):
        sf.value_at_c(sf.jumps[0].c)


def test_compare_two_cos_pi():
    c = d_k("t-1+t^-1").elements[1][0]          # sqrt 3
    assert compare_two_cos_pi(c, Fraction(1, 6)) == 0
    assert compare_two_cos_pi(c, Fraction(1, 5)) == 1
    assert compare_two_cos_pi(c, Fraction(1, 7)) == -1


def test_cyclotomic_membership():
    assert two_cos_pi_is_root([-1, 1], Fraction(1, 3))
    assert not two_cos_pi_is_root([-1, 1], Fraction(1, 4))
    assert root_of_unity_in_dk("t-1+t^-1", Fraction(1, 6))
    assert not root_of_unity_in_dk("t-1+t^-1", Fraction(1, 5))


def test_exact_small_signatures():
    assert symmetric_signature([[1, 2], [2, 1]]) == (1, 1, 0)
    assert hermitian_signature([[1, 0], [0, 1]], [[0, 1], [-1, 0]]) == 1


@settings(max_examples=40)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=4, max_size=4))
def test_symmetric_signature_matches_numpy(rows):
    A = np.array(rows)
    S = (A + A.T).tolist()
    pos, neg, zero = symmetric_signature(S)
    ev = np.linalg.eigvalsh(np.array(S, dtype=float))
    assert (pos, neg, zero) == (int((ev > 1e-9).sum()), int((ev < -1e-9).sum()),
                                int((abs(ev) <= 1e-9).sum()))
    assert ldl_inertia(S) == (pos, neg, zero)


def test_unknot_signature_constant():
    sf = signature_function(raw("1", signature=0))
    assert sf.is_constant() and sf.values == (0,)
    assert LaurentPoly.const(1) == raw("1").presentation.alexander
