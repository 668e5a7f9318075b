import math

import pytest
from hypothesis import given, strategies as st

from unipart.geometry import (
    BadFraction,
    NotAVertex,
    NotOnCircle,
    Point,
    Segment,
    arc_length,
    convex_hull,
    distance,
    foot_of_perpendicular,
    fraction_line,
    hull_neighbors,
    in_band,
    point_on_arc_at,
    polygon_area,
    triangle_centroid,
)
from unipart.model import Rectangle, Square

from .oracles import brute_hull_vertices

R42 = Rectangle(4.0, 2.0)
coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
pt = st.tuples(coord, coord)


@pytest.mark.parametrize(
    "p,q,d", [((0, 0), (0, 0), 0.0), ((0, 0), (3, 4), 5.0), ((1, 0.5), (1, 0), 0.5)]
)
def test_distance_examples(p, q, d):
    assert distance(p, q) == pytest.approx(d)


def test_foot_of_perpendicular():
    bottom = Segment(Point(0, 0), Point(4, 0))
    assert foot_of_perpendicular((1, 0.5), bottom) == pytest.approx((1, 0))
    assert foot_of_perpendicular((2.5, 0), bottom) == pytest.approx((2.5, 0))
    # projection of (2,1) on y=x: t = (2+1)/2
    assert foot_of_perpendicular((2, 1), Segment(Point(0, 0), Point(4, 4))) == pytest.approx((1.5, 1.5))


def test_hull_examples():
    assert convex_hull([(0, 0)]) == [(0, 0)]
    hull = convex_hull([(0, 0), (4, 0), (4, 2), (0, 2), (2, 1)])
    assert hull == [(0, 0), (4, 0), (4, 2), (0, 2)]


def test_hull_collinear_returns_chain_ends():
    hull = convex_hull([(0, 0), (1, 1), (3, 3), (2, 2)])
    assert set(hull) == {(0, 0), (3, 3)}


def test_hull_neighbors():
    sq = convex_hull([(0, 0), (4, 0), (4, 2), (0, 2)])
    assert set(hull_neighbors(sq, (0, 0))) == {(0, 2), (4, 0)}
    assert hull_neighbors([Point(0, 0), Point(1, 0)], (0, 0)) == ((1, 0), (1, 0))
    tri = convex_hull([(0, 0), (2, 0), (1, 1)])
    for v in tri:
        assert set(hull_neighbors(tri, v)) == set(tri) - {v}
    with pytest.raises(NotAVertex):
        hull_neighbors(sq, (1, 1))


def test_fraction_lines():
    fl = fraction_line(R42, "bottom", 1 / 8)
    assert fl.segment.a == pytest.approx((0, 2 * (1 / 8)))
    assert fl.segment.b == pytest.approx((4, 0.25))
    mid = fraction_line(R42, "bottom", 0.5)
    assert {mid.segment.a.y, mid.segment.b.y} == {1.0}
    left = fraction_line(Square(4.0), "left", 0.25)
    assert {left.segment.a.x, left.segment.b.x} == {4 * 0.25}
    with pytest.raises(BadFraction):
        fraction_line(R42, "bottom", 1.0)


def test_bands():
    assert in_band((2, 0.1), R42, "bottom", 0, 1 / 8, "[]")
    assert in_band((2, 0.25), R42, "bottom", 0, 1 / 8, "(]")
    assert not in_band((2, 0.25), R42, "bottom", 0, 1 / 8, "()")
    assert not in_band((2, 1.9), R42, "bottom", 0, 1 / 8, "[]")


def test_arcs():
    assert arc_length(1, (1, 0), (0, 1), "ccw") == pytest.approx(math.pi / 2)
    assert arc_length(1, (1, 0), (1, 0), "ccw") == 0
    assert arc_length(1, (1, 0), (0, 1), "cw") == pytest.approx(2 * math.pi - math.pi / 2)
    assert point_on_arc_at(1, (1, 0), "ccw", math.pi / 2) == pytest.approx((0, 1), abs=1e-12)
    assert point_on_arc_at(1, (1, 0), "ccw", 0) == pytest.approx((1, 0))
    assert point_on_arc_at(1, (1, 0), "ccw", math.pi / 8) == pytest.approx((math.cos(math.pi / 8), math.sin(math.pi / 8)))
    with pytest.raises(NotOnCircle):
        arc_length(1, (0.5, 0), (0, 1), "ccw")


def test_centroids_and_areas():
    assert triangle_centroid((0, 0), (4, 0), (2, 2)) == pytest.approx((2, 2 / 3))
    assert triangle_centroid((0, 0), (0, 0), (0, 0)) == (0, 0)
    assert triangle_centroid((2, 0), (0, 0), (4, 4)) == pytest.approx((2, 4 / 3))
    assert polygon_area([(0, 0), (1, 0), (1, 1), (0, 1)]) == pytest.approx(1)
    # shoelace for (2,0),(0,0),(4,4): |2*0-0*0 + 0*4-4*0 + 4*0-2*4| / 2
    assert polygon_area([(2, 0), (0, 0), (4, 4)]) == pytest.approx(abs(0 + 0 - 8) / 2)
    assert polygon_area([(0, 0), (4, 0), (4, 2), (0, 2)]) == pytest.approx(8)


# ------------------------------------------------------------- properties


@given(pt, pt, pt)
def test_distance_is_a_metric(a, b, c):
    assert distance(a, b) >= 0
    assert distance(a, b) == distance(b, a)
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9


@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=1, max_size=12))
def test_hull_matches_brute_force(raw):
    pts = [(float(x), float(y)) for x, y in raw]
    hull = convex_hull(pts)
    expected = brute_hull_vertices(pts)
    if len(expected) >= 3 or len(set(pts)) == 1:
        assert {tuple(p) for p in hull} == expected
    else:
        # collinear input: the chain's two ends
        assert {tuple(p) for p in hull} <= {tuple(p) for p in pts}
        assert len(hull) == 2 and {tuple(p) for p in hull} == expected


@given(st.floats(0, 2 * math.pi), st.floats(0.01, 2 * math.pi - 0.01), st.floats(0.1, 5))
def test_arc_lengths_add_to_circumference(a0, delta, r):
    a = (r * math.cos(a0), r * math.sin(a0))
    b = (r * math.cos(a0 + delta), r * math.sin(a0 + delta))
    total = arc_length(r, a, b, "ccw") + arc_length(r, b, a, "ccw")
    assert total == pytest.approx(2 * math.pi * r, rel=1e-9)


@given(st.floats(0, 2 * math.pi), st.floats(0, 6.2), st.floats(0.1, 5), st.sampled_from(["cw", "ccw"]))
def test_point_on_arc_round_trip(a0, frac, r, direction):
    start = (r * math.cos(a0), r * math.sin(a0))
    length = frac * r
    end = point_on_arc_at(r, start, direction, length)
    # endpoints closer than eps count as one point, so lengths below eps read as 0
    assert arc_length(r, start, end, direction) == pytest.approx(length, abs=1e-9 * r + 1e-9)


@given(pt, pt, pt)
def test_triangle_area_matches_cross_product(a, b, c):
    cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if abs(cross) < 1e-6:
        return
    assert polygon_area([a, b, c]) == pytest.approx(abs(cross) / 2, rel=1e-12)
