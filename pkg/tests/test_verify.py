import math

import pytest
from hypothesis import given, settings, strategies as st

from unipart.algo_circle import circ_step
from unipart.algo_rectangle import rect_step
from unipart.cli_trace import random_initial
from unipart.geometry import Point
from unipart.model import SEGMENT, Circle, LightColor, Rectangle, Square
from unipart.scheduler import ActivationEvent, FSync, RandomAsync, Trace, TraceFinal, TraceHeader, run
from unipart.verify import (
    Unrecognized,
    build_partition,
    check_no_collision,
    color_usage,
    epoch_bound_check,
    fit_linear_envelope,
    infer_partition_type,
)

from .oracles import sampled_min_distance

OFF = LightColor.OFF
REG = Rectangle(4, 2)


def _move(robot, a, b, t0, t1, before=OFF, after=OFF):
    return ActivationEvent(robot, t0, t0, t1, before, after, Point(*a), Point(*b), SEGMENT)


def _trace(initial, events, region=REG, final_colors=None, epochs=0):
    n = len(initial)
    pos = list(map(Point._make, initial))
    for e in sorted(events, key=lambda e: e.t_move_end):
        pos[e.robot] = e.end
    header = TraceHeader(region, n, 0, FSync(), "test", 1e-9, tuple(map(Point._make, initial)), (OFF,) * n)
    return Trace(header, tuple(events), TraceFinal(tuple(pos), tuple(final_colors or (OFF,) * n), True, epochs))


# --------------------------------------------------------------- collisions


def test_parallel_moves_keep_their_distance():
    tr = _trace([(0, 0), (0, 1)], [_move(0, (0, 0), (2, 0), 0, 1), _move(1, (0, 1), (2, 1), 0, 1)])
    rep = check_no_collision(tr)
    assert not rep.collided and rep.min_approach == pytest.approx(1.0)


def test_crossing_paths_at_different_times():
    tr = _trace([(0, 0), (0, 2)], [_move(0, (0, 0), (2, 2), 0, 1), _move(1, (0, 2), (2, 0), 2, 3)])
    rep = check_no_collision(tr)
    assert not rep.collided and rep.min_approach == pytest.approx(math.sqrt(2))


def test_head_on_swap_is_flagged():
    tr = _trace([(0, 0), (2, 0)], [_move(0, (0, 0), (2, 0), 0, 1), _move(1, (2, 0), (0, 0), 0, 1)])
    rep = check_no_collision(tr)
    assert rep.collided and rep.pair == (0, 1)
    assert rep.min_approach <= 1e-9
    assert rep.interval[0] <= 0.5 <= rep.interval[1]


def test_moving_into_a_parked_robot_is_flagged():
    tr = _trace([(0, 0), (1, 0)], [_move(0, (0, 0), (2, 0), 0, 1)])
    assert check_no_collision(tr).collided


@settings(max_examples=25)
@given(st.integers(2, 4), st.integers(0, 10_000))
def test_exact_check_agrees_with_dense_sampling(n, seed):
    region = Rectangle(3, 1)
    tr = run(region, random_initial(region, n, seed), rect_step, RandomAsync(2.0, 1.0), seed=seed, max_epochs=300, strict=False)
    exact = check_no_collision(tr).min_approach
    sampled = sampled_min_distance(tr, 40)
    # sampling can only overestimate the true minimum
    assert exact <= sampled + 1e-12
    assert sampled - exact < 0.05


# --------------------------------------------------------------- partitions


def test_infer_types():
    assert infer_partition_type(([(0.5, 1), (1.5, 1), (2.5, 1), (3.5, 1)], [OFF] * 4), REG) == "I"
    assert infer_partition_type(([(1, 0.5), (1, 1.5), (3, 0.5), (3, 1.5)], [OFF] * 4), REG) == "II"
    assert infer_partition_type(([(0.5, 0)], [LightColor.FINISH]), Circle(1)) == "V"
    f1, f2 = LightColor.FINISH1, LightColor.FINISH2
    assert infer_partition_type(([(1, 1), (2, 2)], [f1, f1]), Square(4)) == "III"
    assert infer_partition_type(([(1, 1), (2, 2)], [f2, f2]), Square(4)) == "IV"
    with pytest.raises(Unrecognized):
        infer_partition_type(([(1, 0.3), (2, 1.0)], [OFF, OFF]), REG)
    with pytest.raises(Unrecognized):
        infer_partition_type(([(1, 1), (2, 2)], [f1, f2]), Square(4))


def test_type1_strips():
    rep = build_partition(([(0.5, 1), (1.5, 1), (2.5, 1), (3.5, 1)], [OFF] * 4), REG)
    assert rep.areas == pytest.approx([2, 2, 2, 2])
    assert rep.uniform and sorted(rep.assignment.values()) == [0, 1, 2, 3]


def test_uneven_strips_are_not_uniform():
    rep = build_partition(([(0.5, 1), (1.0, 1), (2.5, 1), (3.5, 1)], [OFF] * 4), REG)
    assert not rep.uniform and rep.max_rel_area_error > 0.1


def test_type4_fan_around_centre():
    pts = [(2, 2 / 3), (10 / 3, 2), (2, 10 / 3), (2 / 3, 2)]
    rep = build_partition((pts, [LightColor.FINISH2] * 4), Square(4))
    assert rep.type == "IV" and rep.areas == pytest.approx([4, 4, 4, 4])
    assert rep.uniform


def test_type5_sectors():
    pts = [(0.5 * math.cos(a), 0.5 * math.sin(a)) for a in (0, 2 * math.pi / 3, 4 * math.pi / 3)]
    rep = build_partition((pts, [LightColor.FINISH] * 3), Circle(1))
    assert rep.areas == pytest.approx([math.pi / 3] * 3)
    assert rep.uniform


# ----------------------------------------------------------- colors, epochs


def test_color_usage_collects_every_light():
    h, t = LightColor.HEAD, LightColor.TAIL
    tr = _trace([(0, 0), (0, 1)], [_move(0, (0, 0), (1, 0), 0, 1, OFF, h)], final_colors=(h, t))
    assert color_usage(tr) == {OFF, h, t}


def test_epoch_bound_check():
    trs = [_trace([(0, 0)], [], epochs=e) for e in (3, 40, 60)]
    rep = epoch_bound_check(trs, lambda n: 50 * n)
    assert not rep.ok and rep.violations == [(1, 60, 50)] and rep.per_n_max == {1: 60}
    assert epoch_bound_check(trs[:2], lambda n: 50 * n).ok


def test_linear_envelope():
    assert fit_linear_envelope({1: 3, 2: 5, 3: 7}) == pytest.approx((2, 1))
    assert fit_linear_envelope({1: 10, 2: 10}) == pytest.approx((0, 10))
    a, b = fit_linear_envelope({1: 4, 2: 3, 3: 9, 4: 8})
    assert all(a * n + b >= e - 1e-12 for n, e in {1: 4, 2: 3, 3: 9, 4: 8}.items())


@settings(max_examples=200)
@given(st.dictionaries(st.integers(1, 30), st.integers(0, 500), min_size=1, max_size=10))
def test_envelope_covers_every_point(pts):
    a, b = fit_linear_envelope(pts)
    assert a >= 0 and b >= 0
    assert all(a * n + b >= e - 1e-9 for n, e in pts.items())


def test_real_circle_run_passes_audit():
    tr = run(Circle(1), random_initial(Circle(1), 5, 3), circ_step, RandomAsync(2.0, 1.0), seed=3, max_epochs=1251)
    rep = build_partition(tr.final, Circle(1))
    assert rep.uniform and not check_no_collision(tr).collided
