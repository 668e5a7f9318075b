import math

import pytest
from hypothesis import given, settings, strategies as st

from unipart.algo_circle import (
    BoundaryRing,
    _ring_from,
    circ_boundary_target,
    circ_clusters,
    circ_step,
)
from unipart.cli_trace import random_initial
from unipart.geometry import angle_of
from unipart.model import Circle, LightColor as C, MoveTo, Stay, Terminated
from unipart.scheduler import RandomAsync, Sequential, run

from .conftest import make_snap

R = Circle(1.0)


def P(deg, r=1.0):
    return (r * math.cos(math.radians(deg)), r * math.sin(math.radians(deg)))


def ring_of(degs, colors=None):
    colors = colors or [C.OFF] * len(degs)
    return BoundaryRing(tuple(math.radians(d) for d in degs), tuple(colors), 1.0)


# ------------------------------------------------------------ boundary phase


def test_boundary_straight_out():
    assert circ_boundary_target(make_snap(R, (0.5, 0))) == pytest.approx((1, 0))


def test_boundary_blocked_radial():
    got = circ_boundary_target(make_snap(R, (0.5, 0), [(1, 0)]))
    assert got == pytest.approx(P(22.5))


def test_boundary_offset_scales_with_nearest_off_line_robot():
    got = circ_boundary_target(make_snap(R, (0.5, 0), [(1, 0), (0, 0.9)]))
    assert got == pytest.approx(P(11.25))


def test_boundary_from_centre_bisects_widest_gap():
    got = circ_boundary_target(make_snap(R, (0, 0), [P(0), P(90)]))
    assert got == pytest.approx(P(225))


# ---------------------------------------------------------------- clusters


def test_clusters_head_and_tail():
    cls = circ_clusters(ring_of([0, 90, 180, 250]))
    by = {c.members: c for c in cls}
    big = by[(0, 1, 2)]
    assert (big.head, big.tail, big.head_step, big.eligible) == (0, 2, -1, True)
    one = by[(3,)]
    assert (one.head, one.tail, one.head_step, one.eligible) == (3, 3, 1, True)


def test_cluster_with_lit_member_is_not_eligible():
    cls = circ_clusters(ring_of([0, 90, 180, 250], [C.OFF, C.MID, C.OFF, C.OFF]))
    assert not next(c for c in cls if 1 in c.members).eligible


@pytest.mark.parametrize("degs", [[0, 90, 180, 270], [10, 190], [0, 120, 240], [33]])
def test_full_ring_is_one_headless_cluster(degs):
    (cl,) = circ_clusters(ring_of(degs))
    assert cl.members == tuple(range(len(degs)))
    assert cl.head is None and not cl.eligible


def test_ring_missing_while_interior_robot_off():
    assert _ring_from(make_snap(R, P(0), [P(90, 0.5)])) is None
    assert _ring_from(make_snap(R, P(0), [(P(90, 0.5), C.FINISH)])) is not None


# ------------------------------------------------------------------ actions


def test_single_robot_retreats_to_half_radius():
    assert circ_step(make_snap(R, (1, 0))) == MoveTo(C.FINISH, pytest.approx((0.5, 0)))


def test_uniform_ring_finishes():
    act = circ_step(make_snap(R, P(0), [P(90), P(180), P(270)]))
    assert act.color == C.FINISH and act.target == pytest.approx((0.5, 0))


def test_heads_light_up():
    others = [P(90), P(180), P(250)]
    assert circ_step(make_snap(R, P(0), others)) == Stay(C.HEAD)
    assert circ_step(make_snap(R, P(250), [P(0), P(90), P(180)])) == Stay(C.HEAD)


def test_head_walks_half_the_excess_towards_eligible_cluster():
    act = circ_step(make_snap(R, P(0), [(P(90), C.MID), (P(180), C.TAIL), (P(250), C.OFF)], C.HEAD))
    assert isinstance(act, MoveTo) and act.color == C.MOVE_H
    assert act.path.kind == "arc" and act.path.direction == "cw"
    assert math.degrees(angle_of(act.target)) - 360 == pytest.approx(-10)


def test_tail_waits_for_head():
    snap = make_snap(R, P(180), [(P(90), C.MID), (P(0), C.HEAD), (P(250), C.OFF)], C.TAIL)
    assert circ_step(snap) == Stay(C.TAIL)


def test_move_h_settles_half():
    assert circ_step(make_snap(R, P(0), [P(100)], C.MOVE_H)) == Stay(C.HALF)


def test_finish_terminates_at_half_radius():
    assert circ_step(make_snap(R, (0.5, 0), [], C.FINISH)) == Terminated()
    assert circ_step(make_snap(R, (0.6, 0), [], C.FINISH)) == Stay(C.FINISH)


def test_interior_lit_robot_holds():
    assert circ_step(make_snap(R, (0.3, 0), [], C.HEAD)) == Stay(C.HEAD)


# -------------------------------------------------------------- properties


def _quiescent_rings(tr):
    """Ring states where every robot is OFF on the circumference, in time order."""
    pos = list(tr.header.initial)
    col = list(tr.header.initial_colors)
    for e in sorted(tr.events, key=lambda e: e.t_move_end):
        pos[e.robot], col[e.robot] = e.end, e.color_after
        if set(col) != {C.OFF} or any(abs(math.hypot(*p) - 1) > 1e-9 for p in pos):
            continue
        order = sorted(range(len(pos)), key=lambda k: angle_of(pos[k]))
        ring = BoundaryRing(tuple(angle_of(pos[k]) for k in order), tuple(col[k] for k in order), 1.0)
        yield [frozenset(order[m] for m in c.members) for c in circ_clusters(ring)]


@settings(max_examples=200)
@given(st.integers(2, 6), st.integers(0, 10_000), st.booleans())
def test_clusters_persist_and_grow(n, seed, sequential):
    sched = Sequential() if sequential else RandomAsync(2.0, 1.0)
    tr = run(R, random_initial(R, n, seed), circ_step, sched, seed=seed, max_epochs=50 * n * n + 1, strict=False)
    assert tr.final.terminated
    prev = None
    for clusters in _quiescent_rings(tr):
        if prev is not None:
            # every earlier cluster sits inside one current cluster
            for old in prev:
                if len(old) > 1:
                    assert any(old <= new for new in clusters)
            assert max(map(len, clusters)) >= max(map(len, prev))
        prev = clusters
