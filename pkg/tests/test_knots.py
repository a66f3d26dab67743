import json
import math

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from krl import mirror, parse_knot_spec, raw, seifert, torus, two_bridge
from krl.errors import InvalidDescriptor, ParseError
from krl.knots import (alexander, canonical_two_bridge, descriptor_from_json, descriptor_to_json,
                       determinant, genus_bound, minkus_alexander, parse_catalog, seifert_alexander,
                       seifert_matrix, torus_alexander, two_bridge_representatives,
                       two_bridge_seifert, two_bridge_signature)
from krl.poly import LaurentPoly, normalize_symmetric

T = sympy.symbols("t")


def _sympy_alexander(V):
    """Reference: det(V - t V^T) by sympy, centred and normalised."""
    M = sympy.Matrix(V)
    d = sympy.Poly(sympy.expand((M - T * M.T).det(method="berkowitz")), T)
    cs = d.all_coeffs()[::-1]
    return normalize_symmetric(LaurentPoly.from_list([int(c) for c in cs]))


def _agrees_pointwise(V, delta):
    """det(V - k V^T) = +-k^g delta(k) at 2g + 1 integers k where delta(k) != 0.

    Those values pin down a polynomial of degree 2g."""
    M = sympy.Matrix(V)
    g = len(V) // 2
    ratios, k = [], 2
    while len(ratios) < 2 * g + 1:
        rhs = sympy.Rational(k) ** g * sympy.Rational(str(delta(k)))
        if rhs != 0:
            ratios.append((M - k * M.T).det(method="bareiss") / rhs)
        k += 1
    return set(ratios) in ({1}, {-1})


def coprime_pair(lo=2, hi=9):
    return st.tuples(st.integers(lo, hi), st.integers(lo, hi)).filter(
        lambda pq: pq[0] < pq[1] and math.gcd(*pq) == 1)


def two_bridge_pair(pmax=41):
    return st.integers(1, pmax // 2).map(lambda k: 2 * k + 1).flatmap(
        lambda p: st.tuples(st.just(p), st.integers(1, p - 1).filter(lambda q: math.gcd(p, q) == 1)))


def test_trefoil_models_agree():
    d = LaurentPoly.parse("t-1+t^-1")
    assert torus_alexander(2, 3) == d
    assert minkus_alexander(3, 1) == d
    assert seifert_alexander([[-1, 1], [0, -1]]) == d


def test_known_polynomials():
    assert minkus_alexander(5, 3) == LaurentPoly.parse("-t+3-t^-1")
    assert torus_alexander(3, 4) == LaurentPoly.parse("t^3-t^2+1-t^-2+t^-3")


def test_two_bridge_signatures():
    assert two_bridge_signature(3, 1) == -2
    assert two_bridge_signature(5, 1) == -4
    assert two_bridge_signature(5, 2) == 0


def test_determinants():
    assert determinant(torus(2, 5)) == 5
    assert determinant(two_bridge(7, 2)) == 7
    assert determinant(torus(3, 4)) == 3


def test_genus_bound_torus():
    assert genus_bound(torus(3, 4)) == 3
    assert genus_bound(torus(2, 7)) == 3


def test_representatives_small():
    assert list(two_bridge_representatives(7)) == [(3, 1), (5, 1), (5, 2)]
    assert sum(1 for _ in two_bridge_representatives(100)) == 544


@given(two_bridge_pair())
def test_canonical_is_an_orbit_invariant(pq):
    p, q = pq
    c = canonical_two_bridge(p, q)
    inv = pow(q, -1, p)
    for q2 in (q, p - q, inv, p - inv):
        assert canonical_two_bridge(p, q2) == c


@settings(max_examples=30)
@given(two_bridge_pair(31))
def test_two_bridge_seifert_matches_minkus(pq):
    p, q = pq
    V = two_bridge_seifert(p, q)
    assert _agrees_pointwise(V, minkus_alexander(p, q))
    assert abs(normalize_symmetric(minkus_alexander(p, q))(-1)) == p


@given(st.integers(1, 6).map(lambda k: 2 * k + 1))
def test_torus_seifert_matches_formula(q):
    # only T(2, q) has a Seifert matrix model
    K = torus(2, q)
    assert _agrees_pointwise(seifert_matrix(K), alexander(K))
    if q <= 7:
        assert _sympy_alexander(seifert_matrix(K)) == alexander(K)


@given(coprime_pair())
def test_torus_alexander_is_cyclotomic_quotient(pq):
    p, q = pq
    ref = sympy.cancel((T ** (p * q) - 1) * (T - 1) / ((T ** p - 1) * (T ** q - 1)))
    cs = sympy.Poly(ref, T).all_coeffs()[::-1]
    assert normalize_symmetric(LaurentPoly.from_list([int(c) for c in cs])) == torus_alexander(p, q)


def test_mirror_is_involution():
    K = torus(2, 3)
    assert mirror(K).mirrored and mirror(mirror(K)) == K
    assert alexander(mirror(K)) == alexander(K)


def test_parse_knot_spec_forms():
    assert parse_knot_spec("torus:3,2").label() == "T(2,3)"
    assert parse_knot_spec("2bridge:7/3").label() == "K(7/3)"
    K = parse_knot_spec('raw:"t-1+t^-1";alternating,small;sigma=-2;h=1')
    assert K.h == 1 and K.presentation.signature == -2 and "alternating" in K.flags
    assert parse_knot_spec('{"type":"torus","p":2,"q":5}') == torus(2, 5)


@pytest.mark.parametrize("bad", ["torus:2,4", "2bridge:6/1", "raw:t^2+1", "foo:1",
                                 '{"type":"torus","p":2}'])
def test_parse_knot_spec_rejects(bad):
    with pytest.raises(InvalidDescriptor):
        parse_knot_spec(bad)


def test_seifert_validation():
    with pytest.raises(InvalidDescriptor):
        seifert([[1, 0], [0, 1]])                   # det(V - V^T) = 0
    with pytest.raises(InvalidDescriptor):
        seifert([[1, 1, 0]])


def test_unknown_flag():
    with pytest.raises(InvalidDescriptor):
        torus(2, 3, flags=["hyperbolic"])


def test_catalog_parse_error_reports_line():
    with pytest.raises(ParseError) as e:
        parse_catalog(['{"type":"torus","p":2,"q":3}', "# comment", "not json"])
    assert e.value.line == 3


def test_catalog_duplicate_names():
    rows = ['{"type":"torus","p":2,"q":3,"name":"a"}', '{"type":"torus","p":2,"q":5,"name":"a"}']
    with pytest.raises(InvalidDescriptor):
        parse_catalog(rows)


def test_catalog_fixture(catalog):
    assert len(catalog) == 50
    for K in catalog:
        again = descriptor_from_json(json.loads(json.dumps(descriptor_to_json(K))))
        assert again == K


def test_raw_normalises():
    K = raw("1-t+t^2")
    assert K.presentation.alexander == LaurentPoly.parse("t-1+t^-1")
