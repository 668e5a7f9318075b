"""Uniform sectors of a disk by merging equally spaced clusters.

Robots first reach the circumference. Runs of neighbours that are exactly
``s = 2*pi*rad/N`` apart form clusters; an eligible cluster (one end facing a
wide gap, the other a narrow one) walks towards its wide side, head first,
with the members following one at a time. Clusters only grow, so the ring
eventually becomes a single cluster with every gap equal to ``s``. Each robot
then steps halfway towards the centre and stops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import TWO_PI, Point, angle_of, ccw_angle, point_at_angle, strictly_between
from .model import Circle, LightColor, MoveTo, Snapshot, Stay, Terminated, arc_path

C = LightColor
OFF, HEAD, TAIL, MID, MOVE_H, HALF, FULL, FINISH = (
    C.OFF, C.HEAD, C.TAIL, C.MID, C.MOVE_H, C.HALF, C.FULL, C.FINISH,
)
CLUSTER_COLORS = frozenset({HEAD, TAIL, MID, MOVE_H, HALF, FULL})
HEAD_COLORS = frozenset({HEAD, MOVE_H, HALF, FULL})


# ------------------------------------------------------------------ the ring


@dataclass(frozen=True)
class BoundaryRing:
    """Robots on the circumference, sorted counter-clockwise by angle."""

    angles: tuple[float, ...]
    colors: tuple[LightColor, ...]
    radius: float
    me: int = -1
    tol: float = 1e-9

    @property
    def n(self) -> int:
        return len(self.angles)

    @property
    def s(self) -> float:
        return TWO_PI * self.radius / self.n

    def gap(self, i: int) -> float:
        """Arc length from robot i to its ccw neighbour."""
        if self.n == 1:
            return TWO_PI * self.radius
        return ccw_angle(self.angles[i], self.angles[(i + 1) % self.n]) * self.radius

    def gap_toward(self, i: int, step: int) -> float:
        """Gap between i and its neighbour in direction step (+1 ccw, -1 cw)."""
        return self.gap(i) if step > 0 else self.gap((i - 1) % self.n)

    def cmp(self, g: float) -> int:
        if abs(g - self.s) <= self.tol:
            return 0
        return 1 if g > self.s else -1

    def nb(self, i: int, step: int) -> int:
        return (i + step) % self.n

    def uniform(self) -> bool:
        return all(self.cmp(self.gap(i)) == 0 for i in range(self.n))


@dataclass(frozen=True)
class Cluster:
    members: tuple[int, ...]  # ccw order
    head: int | None
    tail: int | None
    head_step: int  # direction from the head towards its facing robot
    eligible: bool


def circ_clusters(ring: BoundaryRing) -> list[Cluster]:
    n = ring.n
    eq = [ring.cmp(ring.gap(i)) == 0 for i in range(n)]
    if all(eq):
        return [Cluster(tuple(range(n)), None, None, 0, False)]
    out = []
    starts = [i for i in range(n) if not eq[(i - 1) % n]]
    for j in starts:
        members = [j]
        k = j
        while eq[k]:
            k = (k + 1) % n
            members.append(k)
        before = ring.cmp(ring.gap((j - 1) % n))
        after = ring.cmp(ring.gap(k))
        head = tail = None
        step = 0
        if before > 0 and after < 0:
            head, tail, step = j, k, -1
        elif after > 0 and before < 0:
            head, tail, step = k, j, +1
        elif before > 0 and after > 0:
            head = None  # two wide ends
        eligible = head is not None and tail is not None and all(ring.colors[m] == OFF for m in members)
        out.append(Cluster(tuple(members), head, tail, step, eligible))
    return out


def _cluster_of(clusters: list[Cluster], i: int) -> Cluster:
    return next(c for c in clusters if i in c.members)


def _ring_from(snap: Snapshot) -> BoundaryRing | None:
    """Ring of all robots by angle, or None if an interior robot is still in play."""
    region: Circle = snap.region
    rad = region.radius
    tol_r = snap.eps * max(1.0, rad)
    items = [(snap.self_position, snap.self_color, True)]
    items += [(v.position, v.color, False) for v in snap.visible]
    entries = []
    for p, color, mine in items:
        on_rim = abs(math.hypot(p[0], p[1]) - rad) <= tol_r
        if not on_rim and color != FINISH:
            return None
        entries.append((angle_of(p), color, mine))
    entries.sort(key=lambda e: e[0])
    me = next(k for k, e in enumerate(entries) if e[2])
    return BoundaryRing(
        tuple(e[0] for e in entries), tuple(e[1] for e in entries), rad, me, snap.eps * max(1.0, rad)
    )


# ----------------------------------------------------------- to the boundary


def circ_boundary_target(snap: Snapshot) -> Point | None:
    region: Circle = snap.region
    rad = region.radius
    eps = snap.eps
    me = snap.self_position
    rho = math.hypot(me[0], me[1])
    others = [v for v in snap.visible]
    interior_off = [v for v in others if math.hypot(*v.position) < rad - eps * max(1.0, rad) and v.color == OFF]
    if rho <= eps:
        if interior_off:
            return None
        if not others:
            return point_at_angle(rad, TWO_PI * (snap.tie(1 << 16, 7) / float(1 << 16)))
        angs = sorted(angle_of(v.position) for v in others)
        best, at = -1.0, 0.0
        for k, a in enumerate(angs):
            g = ccw_angle(a, angs[(k + 1) % len(angs)]) if len(angs) > 1 else TWO_PI
            if g > best:
                best, at = g, a + g / 2
        return point_at_angle(rad, at)
    theta = angle_of(me)
    p = point_at_angle(rad, theta)
    blocked = any(strictly_between(v.position, me, p, eps) for v in others)
    occupied = any(math.dist(v.position, p) <= eps for v in others)
    if not blocked and not occupied:
        return p
    # robots off the line through self and the centre
    off_line = []
    for v in others:
        q = v.position
        if abs(me[0] * q[1] - me[1] * q[0]) / rho <= eps:
            continue
        a = angle_of(q)
        d = ccw_angle(theta, a)
        off_line.append(min(d, TWO_PI - d) * rad)
    d_r = 0.25 * min(off_line) if off_line else 0.25 * math.pi * rad
    offset = (d_r / rad) * (rad - rho)
    return point_at_angle(rad, theta + offset / rad)


# ------------------------------------------------------------- walking runs


def _walk(ring: BoundaryRing, i: int, step: int, through=frozenset({MID})) -> list[int]:
    """Robots from i's neighbour in direction step, continuing while colored in ``through``.

    The returned list ends with the first robot not in ``through`` (if any).
    """
    out = []
    k = ring.nb(i, step)
    while k != i:
        out.append(k)
        if ring.colors[k] not in through:
            break
        k = ring.nb(k, step)
    return out


def _head_sides(ring: BoundaryRing, i: int) -> list[tuple[int, list[int]]]:
    """Directions and paths (through MIDs) from follower i to a head-colored robot."""
    found = []
    for step in (+1, -1):
        path = _walk(ring, i, step)
        if path and ring.colors[path[-1]] in HEAD_COLORS:
            found.append((step, path))
    return found


def _chain_tight(ring: BoundaryRing, chain: list[int]) -> bool:
    """All consecutive gaps along an index chain equal s."""
    for a, b in zip(chain, chain[1:]):
        step = 1 if ring.nb(a, 1) == b else -1
        if ring.cmp(ring.gap_toward(a, step)) != 0:
            return False
    return True


def _head_done(ring: BoundaryRing, h: int, toward_follower: int) -> bool:
    """The head has finished its own move."""
    c = ring.colors[h]
    if c == HALF:
        return True
    if c == FULL:
        return ring.cmp(ring.gap_toward(h, -toward_follower)) == 0
    return False


def _arc_move(ring: BoundaryRing, i: int, new_angle: float, step: int, color: LightColor) -> MoveTo:
    return MoveTo(color, point_at_angle(ring.radius, new_angle), arc_path("ccw" if step > 0 else "cw"))


def _released(ring: BoundaryRing, me: int, step: int, path: list[int]) -> bool:
    head = path[-1]
    if ring.colors[head] not in (HALF, FULL):
        return False
    if not _chain_tight(ring, [head] + list(reversed(path[:-1])) + [me]):
        return False
    if ring.colors[me] == TAIL:
        return True
    back = _walk(ring, me, -step)
    return bool(back) and ring.colors[back[-1]] == OFF and _chain_tight(ring, [me] + back)


def circ_follow_action(snap: Snapshot, ring: BoundaryRing | None = None):
    ring = ring or _ring_from(snap)
    me = ring.me
    color = ring.colors[me]
    # our own head is always across a gap >= s; a closer one belongs to someone else
    sides = [sp for sp in _head_sides(ring, me) if ring.cmp(ring.gap_toward(me, sp[0])) >= 0]
    if not sides:
        # the head gave up its role before anyone moved
        return Stay(OFF)
    if any(_released(ring, me, st, path) for st, path in sides):
        return Stay(OFF)
    if len(sides) == 2:
        return Stay(color)
    step, path = sides[0]
    head, pred = path[-1], path[0]
    g = ring.gap_toward(me, step)
    if ring.cmp(g) <= 0:
        return Stay(color)
    ready = _head_done(ring, head, -step)
    if pred != head:
        ready = ready and ring.cmp(ring.gap_toward(pred, step)) == 0
    if not ready:
        return Stay(color)
    new_angle = ring.angles[pred] - step * ring.s / ring.radius
    return _arc_move(ring, me, new_angle, step, color)


def _facing_state(ring: BoundaryRing, clusters: list[Cluster], f: int) -> str:
    """'eligible', 'static' (all OFF, cannot move) or 'busy'."""
    cl = _cluster_of(clusters, f)
    if cl.eligible:
        return "eligible"
    if all(ring.colors[m] == OFF for m in cl.members):
        return "static"
    return "busy"


def _move_toward(ring: BoundaryRing, me: int, f: int, step: int, fraction: float, color: LightColor) -> MoveTo:
    excess = ring.gap_toward(me, step) - ring.s
    if fraction >= 1.0:
        new_angle = ring.angles[f] - step * ring.s / ring.radius
    else:
        new_angle = ring.angles[me] + step * fraction * excess / ring.radius
    return _arc_move(ring, me, new_angle, step, color)


def circ_head_action(snap: Snapshot, ring: BoundaryRing | None = None):
    ring = ring or _ring_from(snap)
    me = ring.me
    clusters = circ_clusters(ring)
    cl = _cluster_of(clusters, me)
    if cl.head != me:
        # the wide gap closed from the other side; nothing left to lead
        return Stay(OFF)
    step = cl.head_step
    if len(cl.members) > 1:
        run = _walk(ring, me, -step)
        if not run or ring.colors[run[-1]] != TAIL:
            return Stay(HEAD)
    f = ring.nb(me, step)
    fc = ring.colors[f]
    if fc in (MOVE_H, FULL, TAIL, MID):
        return Stay(HEAD)
    if fc == HEAD:
        return _move_toward(ring, me, f, step, 0.5, MOVE_H)
    if fc == OFF:
        state = _facing_state(ring, clusters, f)
        if state == "busy":
            # waiting here can close a cycle through our own followers
            return Stay(OFF)
        if state == "eligible":
            return _move_toward(ring, me, f, step, 0.5, MOVE_H)
    return _move_toward(ring, me, f, step, 1.0, FULL)


def _settled_head(ring: BoundaryRing, clusters: list[Cluster]):
    """Action for a HALF or FULL robot."""
    me = ring.me
    color = ring.colors[me]
    left, right = ring.nb(me, -1), ring.nb(me, 1)
    if ring.colors[left] in (MID, TAIL) or ring.colors[right] in (MID, TAIL):
        return Stay(color)
    wide = [st for st in (+1, -1) if ring.cmp(ring.gap_toward(me, st)) > 0]
    if color == FULL or not wide:
        return Stay(OFF)
    if len(wide) == 2:
        return Stay(color)
    step = wide[0]
    partner = ring.nb(me, -step)
    if ring.colors[partner] in HEAD_COLORS and ring.cmp(ring.gap_toward(me, -step)) == 0:
        # the partner has landed; the wide gap behind us belongs to someone else
        return Stay(OFF)
    f = ring.nb(me, step)
    if ring.colors[f] in (HALF, FULL):
        # two settled heads back to back: neither is waiting for the other
        return Stay(OFF)
    if ring.colors[f] == OFF and _facing_state(ring, clusters, f) == "static":
        return _move_toward(ring, me, f, step, 1.0, FULL)
    return Stay(color)


def _off_on_ring(ring: BoundaryRing):
    me = ring.me
    if ring.uniform():
        if any(c in CLUSTER_COLORS for c in ring.colors):
            return Stay(OFF)
        return "finish"
    clusters = circ_clusters(ring)
    cl = _cluster_of(clusters, me)
    if cl.eligible and cl.head == me:
        f = ring.nb(me, cl.head_step)
        back = ring.nb(me, -cl.head_step)
        # a lone head must not sit next to another cluster's follower
        lone_ok = len(cl.members) > 1 or back == f or ring.colors[back] not in (TAIL, MID)
        busy = ring.colors[f] == OFF and _facing_state(ring, clusters, f) == "busy"
        if ring.colors[f] in (OFF, HEAD, HALF) and lone_ok and not busy:
            return Stay(HEAD)
        return Stay(OFF)
    if cl.head is not None and cl.tail is not None and ring.colors[cl.head] == HEAD:
        if all(ring.colors[m] in (OFF, MID, TAIL) for m in cl.members if m != cl.head):
            if cl.tail != me:
                return Stay(MID)
            # a lone head just outside would be indistinguishable from ours,
            # unless it is our head's partner
            o = ring.nb(me, -cl.head_step)
            if (
                o != cl.head
                and ring.colors[o] in (HEAD, MOVE_H, FULL)
                and ring.nb(o, -cl.head_step) != cl.head
            ):
                return Stay(OFF)
            return Stay(TAIL)
    return Stay(OFF)


def circ_step(snap: Snapshot):
    region = snap.region
    if not isinstance(region, Circle):
        raise TypeError("circ_step needs a Circle region")
    rad = region.radius
    me = snap.self_position
    color = snap.self_color
    rho = math.hypot(me[0], me[1])
    tol_r = snap.eps * max(1.0, rad)

    if color == FINISH:
        if abs(rho - rad / 2) <= tol_r:
            return Terminated()
        return Stay(FINISH)

    if rho < rad - tol_r:
        if color != OFF:
            return Stay(color)
        t = circ_boundary_target(snap)
        return Stay(OFF) if t is None else MoveTo(OFF, t)

    ring = _ring_from(snap)
    if ring is None:
        return Stay(color)
    if color == OFF:
        # an inner robot means the ring was already uniform; it may hide rim robots
        if any(v.color == FINISH for v in snap.visible):
            return MoveTo(FINISH, Point(me[0] / 2, me[1] / 2))
        act = _off_on_ring(ring)
        if act == "finish":
            return MoveTo(FINISH, Point(me[0] / 2, me[1] / 2))
        return act
    if color == HEAD:
        return circ_head_action(snap, ring)
    if color in (MID, TAIL):
        return circ_follow_action(snap, ring)
    if color == MOVE_H:
        return Stay(HALF)
    if color in (HALF, FULL):
        return _settled_head(ring, circ_clusters(ring))
    raise ValueError(f"color {color} is not used on circles")


circ_step.algorithm_name = "circle"  # type: ignore[attr-defined]
