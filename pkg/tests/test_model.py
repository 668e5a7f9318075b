import math

import pytest
from hypothesis import given, strategies as st

from unipart.model import (
    Circle,
    ConfigError,
    LightColor,
    OutsideRegion,
    Rectangle,
    RobotState,
    Square,
    classify_position,
    compute_snapshot,
    is_occluded,
    region_area,
)
from unipart.geometry import Point

from .oracles import brute_visible


def test_occlusion_examples():
    assert is_occluded((0, 0), (2, 0), (1, 0))
    assert not is_occluded((0, 0), (2, 0), (1, 1))
    assert not is_occluded((0, 0), (2, 0), (3, 0))


def test_three_collinear_robots(snap):
    s = snap(Rectangle(4, 2), (0, 0.5), [(1, 0.5), (2, 0.5)])
    assert [v.position for v in s.visible] == [(1, 0.5)]


def test_two_robots_see_each_other(snap):
    s = snap(Square(4), (1, 1), [(3, 2)])
    assert len(s.visible) == 1


def test_circle_boundary_robots_all_visible():
    angles = [0.1, 1.0, 2.2, 3.0, 4.4, 5.9]
    robots = [RobotState(i, Point(math.cos(a), math.sin(a))) for i, a in enumerate(angles)]
    for i in range(len(robots)):
        assert len(compute_snapshot(robots, i, Circle(1.0)).visible) == len(robots) - 1


def test_classify_position():
    r = Rectangle(4, 2)
    assert classify_position(r, (1, 0.5)).kind == "interior"
    assert classify_position(r, (0, 0)).kind == "corner"
    assert classify_position(r, (2, 0)).where == "bottom"
    assert classify_position(Circle(1), (1, 0)).kind == "boundary"
    with pytest.raises(OutsideRegion):
        classify_position(r, (5, 1))


def test_region_area_and_validation():
    assert region_area(Rectangle(4, 2)) == 8
    assert region_area(Square(4)) == 16
    assert region_area(Circle(1)) == pytest.approx(math.pi)
    with pytest.raises(ConfigError, match="must not be square"):
        Rectangle(4, 4)
    with pytest.raises(ConfigError):
        Circle(0)


def test_snapshot_never_exposes_ids(snap):
    s = snap(Square(4), (1, 1), [(3, 2), (2, 3)])
    assert not hasattr(s, "robots")
    assert all(set(v._fields) == {"position", "color"} for v in s.visible)


# ------------------------------------------------------------- properties

unit = st.floats(0.05, 0.95)


@given(unit, unit, unit, unit, st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_occlusion_asymmetry_on_collinear_triples(ax, ay, bx, by, t, _unused):
    a, b = (ax * 4, ay * 2), (bx * 4, by * 2)
    if math.dist(a, b) < 1e-3:
        return
    m = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
    if min(math.dist(m, a), math.dist(m, b)) < 1e-6:
        return
    robots = [RobotState(0, Point(*a)), RobotState(1, Point(*m)), RobotState(2, Point(*b))]
    seen = {tuple(v.position) for v in compute_snapshot(robots, 0, Rectangle(4, 2)).visible}
    assert tuple(robots[1].position) in seen
    assert tuple(robots[2].position) not in seen


@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 4)), min_size=2, max_size=9, unique=True))
def test_snapshot_matches_brute_force_visibility(cells):
    pos = [Point(x / 2, y / 2) for x, y in cells]
    robots = [RobotState(i, p) for i, p in enumerate(pos)]
    for i in range(len(pos)):
        got = {tuple(v.position) for v in compute_snapshot(robots, i, Rectangle(4, 2)).visible}
        assert got == {tuple(pos[j]) for j in brute_visible(pos, i)}


@given(
    st.lists(st.tuples(st.floats(0, 4), st.floats(0, 2)), min_size=2, max_size=8, unique=True),
    st.integers(0, 2**32),
)
def test_snapshot_determinism(pts, seed):
    robots = [RobotState(i, Point(*p), LightColor.OFF) for i, p in enumerate(pts)]
    shuffled = list(reversed(robots))
    a = compute_snapshot(robots, 0, Rectangle(4, 2), seed)
    b = compute_snapshot(shuffled, 0, Rectangle(4, 2), seed)
    assert a == b


@given(st.lists(st.floats(0, 2 * math.pi), min_size=2, max_size=12, unique=True))
def test_circle_boundary_snapshots_have_n_minus_one_entries(angles):
    pts = [Point(math.cos(a), math.sin(a)) for a in angles]
    if any(math.dist(p, q) < 1e-6 for i, p in enumerate(pts) for q in pts[:i]):
        return
    robots = [RobotState(i, p) for i, p in enumerate(pts)]
    for i in range(len(robots)):
        assert len(compute_snapshot(robots, i, Circle(1.0)).visible) == len(robots) - 1
