import csv
import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from krl import raw, torus, two_bridge
from krl.errors import (BothHeightsZero, ConstantSignature, ParityViolation, ZeroHeightArc,
                        ZeroSignature)
from krl.locus import (ALL_RATIONALS, CSV_HEADER, INF, TRIVIAL, ArcA, ArcB, SlopeSet,
                       arc_violations, branched_refined, branched_threshold,
                       emit_pillowcase_data, first_certified_n, interval, lens_arc_analysis,
                       lens_line, pillowcase_rows, two_bridge_lo, type_a_interval, type_b_interval)
from krl.signatures import signature_function

PRETZEL = "1-t+t^3-t^4+t^5-t^6+t^7-t^9+t^10"

slope = st.fractions(min_value=-50, max_value=50, max_denominator=60)
height = st.integers(-8, 8)
point = st.tuples(st.integers(-3, 3), height)


def numpy_root_x(delta_coeffs):
    """x in (0, 1) with Delta(e^{2 pi i x}) = 0, from numpy.roots."""
    r = np.roots(delta_coeffs[::-1])
    xs = [np.angle(z) / (2 * np.pi) % 1 for z in r if abs(abs(z) - 1) < 1e-8]
    return sorted(xs)


# slope sets and arcs

def test_slope_set_membership():
    S = interval(-1, 1)
    assert 0 in S and Fraction(1, 2) in S and 1 not in S and INF not in S
    assert 0 in TRIVIAL and TRIVIAL.is_trivial()
    assert 10 ** 9 in ALL_RATIONALS


def test_type_a_examples():
    assert str(type_a_interval(ArcA(1, 1)).slopes) == "(-inf, 1)"
    assert str(type_a_interval(ArcA(1, -1)).slopes) == "(-1, inf)"
    # pretzel arc from the parabolic at height 6 in the mirrored picture
    r = type_a_interval(ArcA(6, 1, mirror=True))
    assert str(r.slopes) == "(-6, inf)" and r.branch == "right"
    assert type_a_interval(ArcA.from_endpoints((1, 6), 0.6744)) == r
    assert str(type_a_interval(ArcA(-3, 1)).slopes) == "(-3, inf)"


def test_type_a_zero():
    with pytest.raises(ZeroHeightArc):
        type_a_interval(ArcA(0, 1))
    with pytest.warns(UserWarning):
        assert type_a_interval(ArcA(0, 1), strict=False).slopes.is_trivial()


def test_type_b_examples():
    flat = type_b_interval(ArcB((0, 2), (1, 2))).slopes
    assert str(flat) == "(-inf, inf) \\ {2/n}"
    assert Fraction(2, 3) not in flat and Fraction(3, 2) in flat and 0 in flat
    assert type_b_interval(ArcB((0, 1), (0, -3))).branch == "vertical_all"
    assert str(type_b_interval(ArcB((0, 1), (0, 3))).slopes) == "(-1, 1)"
    r = type_b_interval(ArcB((0, 0), (1, 5)))
    assert str(r.sharp) == "(-5/2, inf)" and str(r.slopes) == "(-1/2, inf)"


def test_type_b_errors():
    with pytest.raises(BothHeightsZero):
        type_b_interval(ArcB((0, 0), (1, 0)))
    with pytest.raises(ValueError):
        ArcB((0, 1), (0, 1))


@given(st.integers(1, 9), slope)
def test_type_b_flat_family(y, r):
    S = type_b_interval(ArcB((0, y), (1, y))).slopes
    for n in list(range(-50, 51)) + [10 ** 6, -10 ** 6, 999_983]:
        if n:
            assert Fraction(y, n) not in S
    if r != 0 and (Fraction(y) / r).denominator != 1:
        assert r in S


@given(point, point)
def test_every_slope_set_contains_zero(p1, p2):
    assume(p1 != p2 and (p1[1], p2[1]) != (0, 0))
    assume(p1[0] == p2[0] or abs(p1[0] - p2[0]) == 1 or p1[1] == p2[1])
    try:
        r = type_b_interval(ArcB(p1, p2))
    except ValueError:
        return
    assert 0 in r.slopes
    if r.sharp is not None:
        assert 0 in r.sharp
        # the sharp set is never smaller than the clamped one
        for x in (Fraction(-1, 3), Fraction(1, 3), Fraction(-2, 5), Fraction(2, 5)):
            if x in r.slopes:
                assert x in r.sharp


@given(st.integers(-9, 9).filter(bool), st.sampled_from([1, -1]), st.booleans())
def test_type_a_contains_zero_and_mirror_flips(k, side, m):
    a = type_a_interval(ArcA(k, side, m))
    b = type_a_interval(ArcA(k, side, not m))
    assert 0 in a.slopes and 0 in b.slopes
    assert a.branch != b.branch


# branched covers

def test_branched_trefoil():
    sf = signature_function(torus(2, 3))
    assert branched_threshold(sf) == 6
    assert first_certified_n(sf) == 7
    assert sorted(branched_refined(sf, 1, 30)) == list(range(7, 31))


def test_branched_k15(k15):
    sf = signature_function(k15)
    assert branched_threshold(sf) == 23
    assert sorted(branched_refined(sf, 3, 60)) == list(range(4, 61))


def test_branched_constant():
    sf = signature_function(raw("1", signature=0))
    with pytest.raises(ConstantSignature):
        branched_threshold(sf)
    with pytest.raises(ConstantSignature):
        first_certified_n(sf)
    assert branched_refined(sf, 0, 20) == set()


@pytest.mark.parametrize("K,h", [(torus(2, 5), 2), (torus(3, 4), 3), (two_bridge(7, 2), 2),
                                 (two_bridge(13, 5), 1)])
def test_branched_witnesses_recheck(K, h):
    sf = signature_function(K)
    found, wit = branched_refined(sf, h, 25, witnesses=True)
    a = [0.0] + [j.alpha() for j in sf.jumps] + [math.pi]
    for n in found:
        w = wit[n]
        x = w.k * math.pi / n
        # independent float check well away from breakpoints
        assert a[w.interval] < x < a[w.interval + 1]
        assert w.h_slr == h + sf.values[w.interval] // 2 != 0


# lens lines

def test_lens_line_examples():
    L = lens_line(18, 0, -18)
    assert L.slope == 18 and L.y_at(1) == 18
    assert L.in_open_part((Fraction(1, 2), 9)) and not L.in_open_part((1, 18))
    assert lens_line(19, 0, -19).slope == 19
    assert arc_violations([(0, 0), (Fraction(1, 36), Fraction(1, 2)), (1, 1)], 18, -18, range(-2, 3)) == [0]


def test_lens_trefoil_p1():
    r = lens_arc_analysis("t-1+t^-1", 1)
    (s,) = r.subintervals
    assert s.roots == 2 and not s.qualifies
    assert s.candidates == (0, 1, -1, 0)
    assert r.slopes.is_trivial()


@pytest.mark.parametrize("p", [18, 19])
def test_lens_pretzel(p):
    r = lens_arc_analysis(PRETZEL, p)
    xs = numpy_root_x([1, -1, 0, 1, -1, 1, -1, 1, 0, -1, 1])
    ref = []
    for n in range(1, p + 1):
        inside = [x for x in xs if (n - 1) / p < x < n / p]
        if len(inside) == 1:
            ref.append(n)
    assert r.qualifying == ref
    assert str(r.slopes) == "(-inf, 1)"
    if p == 18:
        assert r.qualifying == [1, 3, 4, 6, 13, 15, 16, 18]


def test_lens_no_roots():
    r = lens_arc_analysis("-t+3-t^-1", 5)
    assert r.qualifying == [] and r.slopes.is_trivial()


@given(st.integers(1, 30))
def test_lens_candidates_verbatim(p):
    for s in lens_arc_analysis(PRETZEL, p).subintervals:
        n = s.n
        assert s.candidates == (n - 1, n, n - 1 - p, n - p)


def test_lens_endpoint_disqualifies():
    # trefoil roots at x = 1/6 and 5/6 are endpoints for p = 6
    r = lens_arc_analysis("t-1+t^-1", 6)
    assert [s.n for s in r.subintervals if s.on_endpoint] == [1, 2, 5, 6]
    assert r.qualifying == []


# 2-bridge

def test_two_bridge_lo():
    d = two_bridge_lo(3, 1)
    assert [str(o) for o in d.options] == ["(-inf, 1)", "(-1, inf)"]
    assert d.contains_in_all(0)
    with pytest.raises(ZeroSignature):
        two_bridge_lo(5, 3)
    with pytest.raises(ZeroSignature):
        two_bridge_lo(41, 9)
    with pytest.raises(ParityViolation):
        two_bridge_lo(3, 1, heights=[1, 2])


# plot data

def test_pillowcase_trefoil():
    rows = pillowcase_rows(torus(2, 3))
    pts = sorted(x for layer, x, _ in rows if layer == "dk_points")
    assert np.allclose(pts, [1 / 6, 5 / 6])


def test_pillowcase_empty_and_lens(tmp_path):
    buf = io.StringIO()
    assert emit_pillowcase_data(None, buf) == 0
    assert buf.getvalue().strip() == ",".join(CSV_HEADER)
    path = tmp_path / "p.csv"
    n = emit_pillowcase_data(raw(PRETZEL, signature=8), str(path), lens=(18, 19))
    rows = list(csv.reader(open(path)))
    assert len(rows) == n + 1
    layers = {r[0] for r in rows[1:]}
    assert {"lens_18", "lens_19", "dk_points", "reducible_axis"} == layers
