"""Five-color uniform partitioning of a square.

Robots settle on the sides, then terminal robots with a clean interior step
inward to an apex point and count the four side triangles. Depending on the
counts they either migrate towards the fullest side(s) or start one of four
layouts:

* Type I   all robots on one side: strips, robots on the 1/2-line.
* Type II  two opposite sides with equal counts: two rows on the 1/4-lines.
* Type III two adjacent sides with equal counts: a fan of triangles from
  the far corner, robots at the centroids on the 1/3-lines.
* Type IV  four equal sides: a fan from the center, robots on the 1/6-lines.

The side triangle of a side is the triangle spanned by the side and the
center; a robot belongs to the triangle of its nearest side.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .algo_rectangle import _final_local, _off_final_local, base_target
from .frame import LocalView, SideFrame
from .geometry import Point, convex_hull, hull_neighbors, line_distance, same_point
from .model import (
    CORNER_SIDES,
    OPPOSITE,
    SEGMENT,
    SIDES,
    LightColor,
    MoveTo,
    Snapshot,
    Square,
    Stay,
    Terminated,
    classify_position,
)

log = logging.getLogger(__name__)

OFF = LightColor.OFF
MONITOR = LightColor.MONITOR
FINISH = LightColor.FINISH
FINISH1 = LightColor.FINISH1
FINISH2 = LightColor.FINISH2
PLACED = frozenset({FINISH, FINISH1, FINISH2})
APEX_K = 1.0 / 8.0


@dataclass(frozen=True)
class SquareFrame:
    """Side names relative to a robot's own side."""

    side: str
    opp: str
    left: str  # meets ``side`` at local x = 0
    right: str
    center: Point

    @classmethod
    def of(cls, region: Square, side: str, eps: float) -> "SquareFrame":
        f = SideFrame(region, side, eps)
        return cls(side, f.opposite, f.low_end_side(), f.high_end_side(), region.center)

    def adjacent(self) -> tuple[str, str]:
        return (self.left, self.right)


@dataclass(frozen=True)
class MaxSides:
    sides: frozenset
    counts: dict = field(default_factory=dict)


def _view(snap: Snapshot, side: str) -> LocalView:
    return LocalView(snap, SideFrame(snap.region, side, snap.eps))


def _is_interior(snap: Snapshot, p) -> bool:
    return classify_position(snap.region, p, snap.eps).kind == "interior"


def _triangle_sides(region: Square, p, eps: float) -> list[str]:
    """Sides whose triangle holds p; two entries when p sits on a spoke."""
    d = {s: region.depth(s, p) for s in SIDES}
    m = min(d.values())
    return [s for s in SIDES if d[s] <= m + eps]


def triangle_of(snap: Snapshot, p, salt: int = 0) -> str:
    sides = _triangle_sides(snap.region, p, snap.eps)
    if len(sides) > 1:
        log.warning("robot at %s lies on a spoke; tie broken by seed", tuple(p))
        return sides[snap.tie(len(sides), 40 + salt)]
    return sides[0]


def own_side(snap: Snapshot) -> str:
    """The side a robot works from: its boundary side, else its nearest side."""
    place = classify_position(snap.region, snap.self_position, snap.eps)
    if place.kind == "boundary":
        return place.where
    return triangle_of(snap, snap.self_position)


# ------------------------------------------------------------------ counting


def sq_max_sides(snap: Snapshot) -> MaxSides:
    counts = {s: 0 for s in SIDES}
    counts[own_side(snap)] += 1
    for k, v in enumerate(snap.visible):
        counts[triangle_of(snap, v.position, k)] += 1
    best = max(counts.values())
    return MaxSides(frozenset(s for s in SIDES if counts[s] == best), counts)


def sq_target_side_from_max(mx: MaxSides, frame: SquareFrame, tie: int = 0) -> str:
    """Side to gather on when no final layout applies."""
    r, o = frame.side, frame.opp
    adj = set(frame.adjacent())
    m = set(mx.sides)
    if m <= adj:
        if len(m) == 2:
            return sorted(m)[tie % 2]
        return next(iter(m))
    if o in m and r not in m:
        a = m & adj
        if len(a) == 1:
            return next(iter(a))
        return o
    if r in m and o in m and len(m & adj) == 1:
        return next(iter(m & adj))
    return r


# ------------------------------------------------------------------- monitor


def _terminal(view: LocalView) -> bool:
    x = view.me[0]
    left = any(view.on_base(q) and q[0] < x for q, _ in view.others)
    right = any(view.on_base(q) and q[0] > x for q, _ in view.others)
    return not (left and right) and not view.on_ends(view.me)


def _in_shaded(view: LocalView, q) -> bool:
    """Own collar inside the own triangle, or the central square."""
    a = view.L
    lo, hi = APEX_K * a, (1 - APEX_K) * a
    e = view.eps
    x, y = q
    # closed at the 1/8 line: apex points sitting on it would line up with ours
    if e < y <= lo + e and y < x - e and y < a - x - e:
        return True
    return lo + e < x < hi - e and lo + e < y < hi - e


def _monitor_ok(snap: Snapshot, view: LocalView) -> bool:
    if not _terminal(view):
        return False
    for (q, color), v in zip(view.others, snap.visible):
        kind = classify_position(snap.region, v.position, snap.eps).kind
        if kind == "corner":
            return False
        if kind == "interior" and (color != MONITOR or _in_shaded(view, q)):
            return False
    return True


def sq_is_monitor(snap: Snapshot) -> bool:
    place = classify_position(snap.region, snap.self_position, snap.eps)
    if place.kind != "boundary":
        return False
    return _monitor_ok(snap, _view(snap, place.where))


def sq_apex_point(snap: Snapshot) -> Point:
    side = own_side(snap)
    view = _view(snap, side)
    a = view.L
    x = view.me[0]
    off_side = [
        (q, v) for (q, _), v in zip(view.others, snap.visible) if triangle_of(snap, v.position) != side
    ]
    if not off_side:
        # straight up, but never so high that another side becomes nearer
        h = min(APEX_K * a, 0.5 * min(x, a - x))
        return view.frame.world(Point(x, h))
    pts = [view.me] + [q for q, _ in view.others]
    hull = convex_hull(pts, view.eps)
    nbr1 = None
    try:
        n1, n2 = hull_neighbors(hull, view.me, view.eps)
        cands = [n for n in (n1, n2) if not view.on_base(n)]
        if cands:
            nbr1 = min(cands, key=lambda n: math.dist(n, view.me))
    except Exception:
        pass
    if nbr1 is None:
        nbr1 = min((q for q, _ in off_side), key=lambda q: math.dist(q, view.me))
    mates = [abs(q[0] - x) for q, _ in view.others if view.on_base(q)]
    diag1 = line_distance(view.me, (0.0, 0.0), (a, a))
    diag2 = line_distance(view.me, (a, 0.0), (0.0, a))
    d = 0.5 * min([diag1, diag2, a / 4.0] + mates)
    d = min(d, 0.5 * math.dist(view.me, nbr1))
    ux, uy = nbr1[0] - x, nbr1[1] - view.me[1]
    n = math.hypot(ux, uy)
    return view.frame.world(Point(x + d * ux / n, view.me[1] + d * uy / n))


# -------------------------------------------------------------- Types I and II


def _type12_local(view: LocalView, c1: int, c2: int, tie: int) -> Point | None:
    if c1 == 1:
        return Point(view.L / 2.0, view.H / 2.0 if c2 == 0 else view.H / 4.0)
    return _final_local(view, c1, c2, tie)


def sq_type12_point(snap: Snapshot, k: float) -> Point | None:
    mx = sq_max_sides(snap)
    side = own_side(snap)
    view = _view(snap, side)
    c1 = mx.counts[side]
    c2 = 0 if k == 0.5 else mx.counts[OPPOSITE[side]]
    t = _type12_local(view, c1, c2, snap.tie(2, 3))
    return None if t is None else view.frame.world(t)


def _type12_chain(view: LocalView, tie: int) -> Point | None:
    """Next free slot for a monitor once FINISH robots exist; other monitors are ignored."""
    L, H = view.L, view.H
    lines = (H / 4.0, H / 2.0, 3.0 * H / 4.0)
    placed = [q for q, c in view.others if c == FINISH]
    if not placed or not all(any(view.on_line(q, y) for y in lines) for q in placed):
        return None
    line_y = H / 2.0 if any(view.on_line(q, H / 2.0) for q in placed) else H / 4.0
    x = view.me[0]
    low_free = not any(view.on_base(q) and q[0] < x for q, _ in view.others)
    high_free = not any(view.on_base(q) and q[0] > x for q, _ in view.others)
    if low_free and high_free:
        from_low = tie % 2 == 0
    elif low_free or high_free:
        from_low = low_free
    else:
        return None
    d = min(min(q[0], L - q[0]) for q in placed)
    on_line = [q[0] if from_low else L - q[0] for q in placed if view.on_line(q, line_y)]
    k = 0
    while any(abs(u - (2 * k + 1) * d) <= 10 * view.eps for u in on_line):
        k += 1
    u = (2 * k + 1) * d
    if u >= L - view.eps:
        return None
    return Point(u if from_low else L - u, line_y)


# ----------------------------------------------------------- Types III and IV


def _my_end(view: LocalView, tie: int) -> bool | None:
    """True when this robot fills from local x = 0, False from x = L."""
    x = view.me[0]
    lower = any(view.on_base(q) and q[0] < x - view.eps for q, _ in view.others)
    higher = any(view.on_base(q) and q[0] > x + view.eps for q, _ in view.others)
    if lower and higher:
        return None
    if higher:
        return True
    if lower:
        return False
    return tie % 2 == 0


def _fan_slot(view: LocalView, apex: Point, bl: float, color: LightColor, from_low: bool) -> Point | None:
    """Centroid of the first free fan cell counted from one end of the base."""
    L = view.L
    m = max(1, round(L / bl))
    tol = 10 * view.eps * max(1.0, L)
    taken = [q for q, c in view.others if c == color]

    def centroid(k: int) -> Point:
        if from_low:
            x0, x1 = k * bl, (k + 1) * bl
        else:
            x0, x1 = L - (k + 1) * bl, L - k * bl
        return Point((x0 + x1 + apex[0]) / 3.0, apex[1] / 3.0)

    k = 0
    while k < m and any(same_point(q, centroid(k), tol) for q in taken):
        k += 1
    if k >= m:
        return None
    return centroid(k)


def _adjacent_partner(snap: Snapshot, view: LocalView, frame: SquareFrame) -> str | None:
    """The neighbouring side that shares a Type III layout with ours."""
    hit = set()
    for k, v in enumerate(snap.visible):
        sides = _triangle_sides(snap.region, v.position, snap.eps)
        if len(sides) == 1 and sides[0] in frame.adjacent():
            hit.add(sides[0])
    if len(hit) == 1:
        return hit.pop()
    region = snap.region
    third = region.width / 3.0
    lined = set()
    for v in snap.visible:
        if v.color != FINISH1:
            continue
        for s in frame.adjacent():
            if abs(region.depth(s, v.position) - third) <= 10 * snap.eps and abs(
                region.depth(frame.side, v.position) - third
            ) > 10 * snap.eps:
                lined.add(s)
    if len(lined) == 1:
        return lined.pop()
    return None


def _far_corner_local(view: LocalView, frame: SquareFrame, partner: str) -> Point:
    a = view.L
    return Point(a, a) if partner == frame.left else Point(0.0, a)


def _inverted_bl(snap: Snapshot, placed: list, apex_world: Point, lines: dict) -> float | None:
    """Cell width recovered from placed robots' centroids.

    ``lines`` maps each side to the depth of its centroid line.
    """
    region = snap.region
    best = None
    for p in placed:
        for side, depth in lines.items():
            if abs(region.depth(side, p) - depth) > 10 * snap.eps * max(1.0, region.width):
                continue
            for e in region.side_segment(side):
                x = Point(3 * p[0] - apex_world[0] - e[0], 3 * p[1] - apex_world[1] - e[1])
                bl = math.dist(x, e)
                if bl > snap.eps and (best is None or bl < best):
                    best = bl
    return best


def sq_type3_point(snap: Snapshot, role: str, partner: str | None = None) -> Point | None:
    side = own_side(snap)
    view = _view(snap, side)
    frame = SquareFrame.of(snap.region, side, snap.eps)
    a = view.L
    if partner is None:
        partner = _adjacent_partner(snap, view, frame)
    if partner is None:
        return None
    apex = _far_corner_local(view, frame, partner)
    lines = {side: a / 3.0, partner: a / 3.0}
    placed = [v.position for v in snap.visible if v.color == FINISH1]
    region = snap.region
    for p in placed:
        if not any(abs(region.depth(s, p) - a / 3.0) <= 10 * snap.eps * max(1.0, a) for s in lines):
            return None
    if role == "monitor":
        c1 = sq_max_sides(snap).counts[side]
        bl = a / c1
    else:
        bl = _inverted_bl(snap, placed, view.frame.world(apex), lines)
        if bl is None:
            return None
    from_low = _my_end(view, snap.tie(2, 7))
    if from_low is None:
        return None
    t = _fan_slot(view, apex, bl, FINISH1, from_low)
    return None if t is None else view.frame.world(t)


def sq_type4_point(snap: Snapshot, role: str) -> Point | None:
    side = own_side(snap)
    view = _view(snap, side)
    a = view.L
    region = snap.region
    lines = {s: a / 6.0 for s in SIDES}
    placed = [v.position for v in snap.visible if v.color == FINISH2]
    for p in placed:
        if not any(abs(region.depth(s, p) - a / 6.0) <= 10 * snap.eps * max(1.0, a) for s in SIDES):
            return None
    apex = Point(a / 2.0, a / 2.0)
    if role == "monitor":
        bl = a / sq_max_sides(snap).counts[side]
    else:
        bl = _inverted_bl(snap, placed, region.center, lines)
        if bl is None:
            return None
    from_low = _my_end(view, snap.tie(2, 8))
    if from_low is None:
        return None
    t = _fan_slot(view, apex, bl, FINISH2, from_low)
    return None if t is None else view.frame.world(t)


# ------------------------------------------------------------------ dispatch


def _return_point(view: LocalView) -> Point | None:
    """Where the line from the off-side hull neighbour through us meets the base.

    The apex lies on the hull edge towards that neighbour, so this is the spot
    the robot left.
    """
    me = view.me
    hull = convex_hull([me] + [q for q, _ in view.others], view.eps)
    try:
        n1, n2 = hull_neighbors(hull, me, view.eps)
    except Exception:
        return None
    best = None
    for n in {n1, n2}:
        if n[1] <= me[1] + view.eps:
            continue
        t = me[1] / (n[1] - me[1])
        x = me[0] - t * (n[0] - me[0])
        if not view.eps < x < view.L - view.eps:
            continue
        if any(same_point(q, (x, 0.0), view.eps) for q, _ in view.others):
            continue
        if best is None or abs(x - me[0]) < abs(best[0] - me[0]):
            best = Point(x, 0.0)
    return best


def _decide(snap: Snapshot, at_apex: bool):
    """Final layout or migration for a robot that can see every side."""
    side = own_side(snap)
    frame = SquareFrame.of(snap.region, side, snap.eps)
    view = _view(snap, side)
    mx = sq_max_sides(snap)
    cnt = mx.counts
    here = MONITOR if at_apex else OFF
    m = set(mx.sides)
    if m == {side} and all(cnt[s] == 0 for s in SIDES if s != side):
        t = _type12_local(view, cnt[side], 0, snap.tie(2, 3))
        return Stay(here) if t is None else MoveTo(FINISH, view.frame.world(t))
    if m == {side, frame.opp} and cnt[frame.left] == 0 and cnt[frame.right] == 0:
        t = _type12_local(view, cnt[side], cnt[frame.opp], snap.tie(2, 3))
        return Stay(here) if t is None else MoveTo(FINISH, view.frame.world(t))
    if len(m) == 2 and side in m:
        other = next(iter(m - {side}))
        if other in frame.adjacent() and cnt[frame.opp] == 0 and cnt[OPPOSITE[other]] == 0:
            t = sq_type3_point(snap, "monitor", other)
            return Stay(here) if t is None else MoveTo(FINISH1, t)
    if len(m) == 4:
        t = sq_type4_point(snap, "monitor")
        return Stay(here) if t is None else MoveTo(FINISH2, t)
    tgt = sq_target_side_from_max(mx, frame, snap.tie(2, 9))
    if tgt == side:
        if not at_apex:
            return Stay(OFF)
        t = _return_point(view)
        if t is None:
            t = base_target(view, "interior", snap.tie(2, 10))
        return Stay(MONITOR) if t is None else MoveTo(MONITOR, view.frame.world(t), SEGMENT)
    region = snap.region
    mine = region.depth(tgt, snap.self_position)
    for v in snap.visible:
        # a MONITOR back on its side only turns OFF next
        if v.color != MONITOR or classify_position(region, v.position, snap.eps).kind != "interior":
            continue
        if region.depth(tgt, v.position) <= mine + snap.eps:
            return Stay(here)
    far = _view(snap, tgt)
    kind = "end" if (not at_apex and tgt != frame.opp) else "interior"
    t = base_target(far, kind, snap.tie(2, 11))
    return Stay(here) if t is None else MoveTo(OFF, far.frame.world(t), SEGMENT)


def _monitor_step(snap: Snapshot):
    region = snap.region
    side = own_side(snap)
    view = _view(snap, side)
    a = view.L
    interior = [v for v in snap.visible if _is_interior(snap, v.position)]
    if any(v.color == OFF for v in interior):
        return Stay(MONITOR)
    colors = {v.color for v in interior} & PLACED
    if len(colors) > 1:
        return Stay(MONITOR)
    if colors == {FINISH}:
        t = _type12_chain(view, snap.tie(2, 4))
        return Stay(MONITOR) if t is None else MoveTo(FINISH, view.frame.world(t))
    if colors == {FINISH1}:
        t = sq_type3_point(snap, "monitor")
        return Stay(MONITOR) if t is None else MoveTo(FINISH1, t)
    if colors == {FINISH2}:
        t = sq_type4_point(snap, "monitor")
        return Stay(MONITOR) if t is None else MoveTo(FINISH2, t)
    del region, a
    return _decide(snap, at_apex=True)


def _off_on_side(snap: Snapshot, side: str):
    view = _view(snap, side)
    interior = [v for v in snap.visible if _is_interior(snap, v.position)]
    placed = [v for v in interior if v.color in PLACED]
    if placed:
        if not _terminal(view) or any(v.color not in PLACED for v in interior):
            return Stay(OFF)
        colors = {v.color for v in placed}
        if colors == {FINISH}:
            t = _off_final_local(view, snap.tie(2, 4))
            return Stay(OFF) if t is None else MoveTo(FINISH, view.frame.world(t))
        if colors == {FINISH1}:
            t = sq_type3_point(snap, "off")
            return Stay(OFF) if t is None else MoveTo(FINISH1, t)
        if colors == {FINISH2}:
            t = sq_type4_point(snap, "off")
            return Stay(OFF) if t is None else MoveTo(FINISH2, t)
        return Stay(OFF)
    if not _monitor_ok(snap, view):
        return Stay(OFF)
    if not any(view.on_base(q) for q, _ in view.others):
        # alone on its side: it already sees everything from here
        return _decide(snap, at_apex=False)
    return MoveTo(MONITOR, sq_apex_point(snap), SEGMENT)


def _to_side(snap: Snapshot):
    place = classify_position(snap.region, snap.self_position, snap.eps)
    if place.kind == "corner":
        side = CORNER_SIDES[place.where][snap.tie(2, 1)]
        kind = "corner"
    else:
        side = triangle_of(snap, snap.self_position)
        kind = "interior"
    view = _view(snap, side)
    t = base_target(view, kind, snap.tie(2, 1))
    return Stay(OFF) if t is None else MoveTo(OFF, view.frame.world(t), SEGMENT)


def sq_step(snap: Snapshot):
    if not isinstance(snap.region, Square):
        raise TypeError("sq_step needs a Square region")
    color = snap.self_color
    if color in PLACED:
        return Terminated()
    place = classify_position(snap.region, snap.self_position, snap.eps)
    if color == MONITOR:
        if place.kind == "boundary":
            return Stay(OFF)
        return _monitor_step(snap)
    if color != OFF:
        raise ValueError(f"color {color} is not used on squares")
    if place.kind != "boundary":
        return _to_side(snap)
    return _off_on_side(snap, place.where)


sq_step.algorithm_name = "square"  # type: ignore[attr-defined]
