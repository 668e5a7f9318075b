"""Two-color uniform partitioning of a non-square rectangle.

Robots first settle on the two long sides. Terminal robots that see a clean
interior step inward to a vantage line at 1/8 of the width, count both long
sides, and either send the minority side across, or start the final layout:
strips on the half-line when one side holds everyone, or two rows on the
quarter-lines when both sides hold the same number. The remaining robots
fill the free slots from the ends.

All rules are written in a local frame where the robot's reference long
side is the local x-axis. ``L`` is the long-side length and ``H`` the
short-side length.
"""

from __future__ import annotations

from .frame import LocalView, SideFrame
from .geometry import Point, convex_hull, hull_neighbors, same_point, side_of_line, strictly_between
from .model import (
    SEGMENT,
    LightColor,
    MoveTo,
    Rectangle,
    Snapshot,
    Stay,
    Terminated,
    classify_position,
)

OFF = LightColor.OFF
FINISH = LightColor.FINISH
APEX_K = 1.0 / 8.0


def _view(snap: Snapshot, side: str) -> LocalView:
    return LocalView(snap, SideFrame(snap.region, side, snap.eps))


def _nearest_long_side(snap: Snapshot) -> str:
    region: Rectangle = snap.region
    a, b = region.long_sides
    da = region.depth(a, snap.self_position)
    db = region.depth(b, snap.self_position)
    if abs(da - db) <= snap.eps:
        return (a, b)[snap.tie(2)]
    return a if da < db else b


def _own_long_side(snap: Snapshot) -> str | None:
    region: Rectangle = snap.region
    p = snap.self_position
    if any(abs(region.depth(s, p)) <= snap.eps for s in region.short_sides):
        return None
    for s in region.long_sides:
        if abs(region.depth(s, p)) <= snap.eps:
            return s
    return None


def rect_target_side(snap: Snapshot) -> str:
    place = classify_position(snap.region, snap.self_position, snap.eps)
    region: Rectangle = snap.region
    if place.kind == "corner":
        from .model import CORNER_SIDES

        return next(s for s in CORNER_SIDES[place.where] if s in region.long_sides)
    if place.kind == "boundary" and place.where in region.long_sides:
        return place.where
    return _nearest_long_side(snap)


def base_target(view: LocalView, kind: str, tie: int) -> Point | None:
    """Landing point on the local base line, or None to wait.

    ``kind`` is "interior" for a robot strictly inside, "end" for a robot on
    a side perpendicular to the base, and "corner" for a corner robot.
    """
    eps = view.eps
    x, y = view.me
    foot = Point(x, 0.0)
    if y > eps and any(strictly_between(q, view.me, foot, eps) for q, _ in view.others):
        return None
    occupied = any(same_point(q, foot, eps) for q, _ in view.others)
    if kind == "interior" and not occupied:
        return foot
    if kind == "end" and occupied:
        return None
    off_line = [abs(q[0] - x) for q, _ in view.others if abs(q[0] - x) > eps]
    if off_line:
        offset = 0.25 * min(off_line)
    else:
        offset = 0.5 * max(x, view.L - x)
    room_hi, room_lo = view.L - x, x
    if abs(room_hi - room_lo) <= eps:
        sign = 1.0 if tie % 2 == 0 else -1.0
    else:
        sign = 1.0 if room_hi > room_lo else -1.0
    return Point(x + sign * offset, 0.0)


def rect_target_point(snap: Snapshot, side: str) -> Point | None:
    view = _view(snap, side)
    place = classify_position(snap.region, snap.self_position, snap.eps)
    kind = {"interior": "interior", "corner": "corner"}.get(place.kind, "end")
    if place.kind == "boundary" and place.where not in snap.region.short_sides:
        kind = "interior"
    t = base_target(view, kind, snap.tie(2, 1))
    return None if t is None else view.frame.world(t)


def _terminal_on_base(view: LocalView) -> bool:
    x = view.me[0]
    left = any(view.on_base(q) and q[0] < x for q, _ in view.others)
    right = any(view.on_base(q) and q[0] > x for q, _ in view.others)
    return not (left and right) and not view.on_ends(view.me)


def _monitor_conditions(view: LocalView) -> bool:
    H = view.H
    if not _terminal_on_base(view):
        return False
    for q, color in view.others:
        if view.in_y(q, 0.0, (1 - APEX_K) * H, "()"):
            return False
        if view.in_y(q, (1 - APEX_K) * H, H, "[)") and color != FINISH:
            return False
        if view.on_ends(q):
            return False
    return True


def rect_is_monitor(snap: Snapshot) -> bool:
    side = _own_long_side(snap)
    if side is None:
        return False
    return _monitor_conditions(_view(snap, side))


def _apex_local(view: LocalView, tie: int) -> Point:
    H = view.H
    x = view.me[0]
    y_apex = APEX_K * H
    far = [q for q, _ in view.others if view.in_y(q, (1 - APEX_K) * H, H)]
    if not far:
        return Point(x, y_apex)
    hull = convex_hull([view.me] + [q for q, _ in view.others], view.eps)
    try:
        n1, n2 = hull_neighbors(hull, view.me, view.eps)
    except Exception:
        return Point(x, y_apex)
    cands = [n for n in (n1, n2) if view.in_y(n, (1 - APEX_K) * H, H)]
    if not cands:
        return Point(x, y_apex)
    if len(cands) == 2 and not same_point(cands[0], cands[1], view.eps):
        # lone robot on its side: lean towards the emptier end
        cands.sort(key=lambda n: n[0])
        nbr = cands[0] if x < view.L / 2 else cands[1]
        if abs(x - view.L / 2) <= view.eps:
            nbr = cands[tie % 2]
    else:
        nbr = cands[0]
    t = y_apex / nbr[1]
    return Point(x + (nbr[0] - x) * t, y_apex)


def rect_apex_point(snap: Snapshot) -> Point:
    side = _own_long_side(snap) or _nearest_long_side(snap)
    view = _view(snap, side)
    return view.frame.world(_apex_local(view, snap.tie(2, 2)))


def _counts(view: LocalView) -> tuple[int, int]:
    H = view.H
    c1 = 1 + sum(1 for q, _ in view.others if view.in_y(q, 0.0, APEX_K * H))
    c2 = sum(1 for q, _ in view.others if view.in_y(q, (1 - APEX_K) * H, H))
    return c1, c2


def rect_counts(snap: Snapshot) -> tuple[int, int]:
    return _counts(_view(snap, _nearest_long_side(snap)))


def _empty_half(view: LocalView, a: Point, b: Point) -> int:
    """Which open half-plane of line a->b holds no other robot: +1, -1 or 0."""
    sides = {side_of_line(q, a, b, view.eps) for q, _ in view.others}
    sides.discard(0)
    if sides == {1}:
        return -1
    if sides == {-1}:
        return 1
    if not sides:
        return 2
    return 0


def _end_in_half(view: LocalView, a: Point, b: Point, half: int, tie: int) -> str | None:
    """'low' (x = 0) or 'high' (x = L) end lying in the given half-plane of a->b."""
    if half == 2:
        return ("low", "high")[tie % 2]
    if half == 0:
        return None
    low = [side_of_line(p, a, b, 0.0) for p in ((0.0, 0.0), (0.0, view.H))]
    high = [side_of_line(p, a, b, 0.0) for p in ((view.L, 0.0), (view.L, view.H))]
    low_hit, high_hit = half in low, half in high
    if low_hit and not high_hit:
        return "low"
    if high_hit and not low_hit:
        return "high"
    return None


def _final_local(view: LocalView, c1: int, c2: int, tie: int) -> Point | None:
    L, H = view.L, view.H
    me = view.me
    if c1 <= 0:
        return None
    if c2 == 0:
        line_y = H / 2.0
        half = _empty_half(view, me, Point(me[0], H))
        end = _end_in_half(view, me, Point(me[0], H), half, tie)
    elif c1 == c2:
        line_y = H / 4.0
        hull = convex_hull([me] + [q for q, _ in view.others], view.eps)
        try:
            n1, n2 = hull_neighbors(hull, me, view.eps)
        except Exception:
            return None
        far = [n for n in (n1, n2) if n[1] > H / 2.0]
        if len(far) != 1:
            return None
        half = _empty_half(view, me, far[0])
        end = _end_in_half(view, me, far[0], half, tie)
    else:
        return None
    if end is None:
        return None
    d = L / (2.0 * c1)
    return Point(d if end == "low" else L - d, line_y)


def rect_final_point(snap: Snapshot, c1: int, c2: int) -> Point | None:
    view = _view(snap, _nearest_long_side(snap))
    t = _final_local(view, c1, c2, snap.tie(2, 3))
    return None if t is None else view.frame.world(t)


def _off_final_local(view: LocalView, tie: int) -> Point | None:
    L, H = view.L, view.H
    eps = view.eps
    lines = (H / 4.0, H / 2.0, 3.0 * H / 4.0)
    placed = []
    for q, color in view.others:
        if not view.is_interior(q):
            continue
        if color != FINISH:
            return None
        if not any(view.on_line(q, y) for y in lines):
            return None
        placed.append(q)
    if not placed:
        return None
    if any(view.on_line(q, H / 2.0) for q in placed):
        line_y = H / 2.0
    elif any(view.on_line(q, H / 4.0) for q in placed) or any(view.on_line(q, 3 * H / 4.0) for q in placed):
        line_y = H / 4.0
    else:
        return None
    x = view.me[0]
    low_visible = not any(view.on_base(q) and q[0] < x for q, _ in view.others)
    high_visible = not any(view.on_base(q) and q[0] > x for q, _ in view.others)
    if low_visible and high_visible:
        from_low = tie % 2 == 0
    elif low_visible or high_visible:
        from_low = low_visible
    else:
        return None
    d = min(min(q[0], L - q[0]) for q in placed)
    on_line = [q[0] if from_low else L - q[0] for q in placed if view.on_line(q, line_y)]
    k = 0
    while any(abs(u - (2 * k + 1) * d) <= 10 * eps for u in on_line):
        k += 1
    u = (2 * k + 1) * d
    if u >= L - eps:
        return None
    return Point(u if from_low else L - u, line_y)


def rect_off_final(snap: Snapshot) -> Point | None:
    side = _own_long_side(snap)
    if side is None:
        return None
    view = _view(snap, side)
    if not _terminal_on_base(view):
        return None
    t = _off_final_local(view, snap.tie(2, 4))
    return None if t is None else view.frame.world(t)


def _back_to_base(view: LocalView, tie: int) -> Point | None:
    t = base_target(view, "interior", tie)
    return None if t is None else view.frame.world(t)


def _step_off_on_side(snap: Snapshot, side: str) -> object:
    view = _view(snap, side)
    H = view.H
    for q, color in view.others:
        if color == OFF and not (view.on_base(q) or view.on_top(q)):
            return Stay(OFF)
    if _monitor_conditions(view):
        x = view.me[0]
        mates = any(view.on_base(q) for q, _ in view.others)
        across = sum(1 for q, _ in view.others if view.in_y(q, (1 - APEX_K) * H, H))
        if not mates and across == 1:
            return MoveTo(FINISH, view.frame.world(Point(view.L / 2.0, H / 4.0)))
        if mates and across == 1:
            return Stay(OFF)
        if not mates and across >= 2:
            far = _view(snap, view.frame.opposite)
            t = base_target(far, "interior", snap.tie(2, 5))
            return Stay(OFF) if t is None else MoveTo(OFF, far.frame.world(t))
        del x
        return MoveTo(FINISH, view.frame.world(_apex_local(view, snap.tie(2, 2))))
    t = rect_off_final(snap)
    if t is not None:
        return MoveTo(FINISH, t)
    return Stay(OFF)


def _step_finish_at_apex(snap: Snapshot, view: LocalView) -> object:
    H = view.H
    lo, hi = APEX_K * H, (1 - APEX_K) * H
    tie = snap.tie(2, 6)
    for q, color in view.others:
        if color == OFF and view.is_interior(q):
            return Stay(FINISH)
    finishers = [q for q, c in view.others if c == FINISH]
    if any(view.in_y(q, lo, hi, "()") for q in finishers):
        t = _back_to_base(view, tie)
        return Stay(FINISH) if t is None else MoveTo(FINISH, t)
    if any(view.in_y(q, 0.0, lo, "[)") or view.in_y(q, hi, H, "(]") for q in finishers):
        return Stay(FINISH)
    c1, c2 = _counts(view)
    if 0 < c2 < c1:
        t = _back_to_base(view, tie)
        return Stay(FINISH) if t is None else MoveTo(FINISH, t)
    if 0 < c1 < c2:
        if any(view.in_y(q, hi, H, "[)") for q in finishers):
            return Stay(FINISH)
        far = _view(snap, view.frame.opposite)
        t = base_target(far, "interior", tie)
        return Stay(FINISH) if t is None else MoveTo(OFF, far.frame.world(t))
    t = _final_local(view, c1, c2, snap.tie(2, 3))
    if t is None:
        back = _back_to_base(view, tie)
        return Stay(FINISH) if back is None else MoveTo(FINISH, back)
    return MoveTo(FINISH, view.frame.world(t))


def rect_step(snap: Snapshot):
    if not isinstance(snap.region, Rectangle):
        raise TypeError("rect_step needs a Rectangle region")
    own = _own_long_side(snap)
    if snap.self_color == OFF:
        if own is None:
            side = rect_target_side(snap)
            t = rect_target_point(snap, side)
            return Stay(OFF) if t is None else MoveTo(OFF, t, SEGMENT)
        return _step_off_on_side(snap, own)
    if snap.self_color == FINISH:
        if own is not None:
            return Stay(OFF)
        view = _view(snap, _nearest_long_side(snap))
        H = view.H
        if view.on_line(view.me, H / 2.0) or view.on_line(view.me, H / 4.0):
            return Terminated()
        if view.on_line(view.me, APEX_K * H):
            return _step_finish_at_apex(snap, view)
        return Stay(FINISH)
    raise ValueError(f"color {snap.self_color} is not used on rectangles")


rect_step.algorithm_name = "rectangle"  # type: ignore[attr-defined]
