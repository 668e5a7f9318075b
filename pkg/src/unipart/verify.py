"""Post-hoc checks on traces: collisions, partition audit, colors, epochs."""

from __future__ import annotations

import bisect
import heapq
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .frame import SideFrame
from .geometry import EPS, TWO_PI, Point, angle_of, ccw_angle, distance, point_in_polygon, polygon_area
from .model import Circle, LightColor, Rectangle, Region, Square, region_area
from .scheduler import ActivationEvent, Trace, interpolate


class Unrecognized(ValueError):
    """Final configuration matches no partition type."""


class RobotOnCellBoundary(ValueError):
    pass


class CountMismatch(ValueError):
    pass


# --------------------------------------------------------------- collisions


@dataclass(frozen=True)
class CollisionReport:
    min_approach: float
    pair: tuple[int, int] | None = None
    interval: tuple[float, float] | None = None
    collided: bool = False


class _Timeline:
    """Piecewise motion of one robot: stationary between moves."""

    def __init__(self, initial: Point, moves: list[ActivationEvent]):
        self.initial = initial
        self.moves = moves
        self.begins = [m.t_move_begin for m in moves]

    def at(self, t: float) -> Point:
        i = bisect.bisect_right(self.begins, t) - 1
        if i < 0:
            return self.initial
        return interpolate(self.moves[i], t)

    def pieces(self, t0: float, t1: float):
        """Yield (a, b, move-or-None) covering [t0, t1]."""
        i = max(0, bisect.bisect_right(self.begins, t0) - 1)
        t = t0
        while t < t1:
            if i < len(self.moves) and self.moves[i].t_move_end <= t:
                i += 1
                continue
            if i < len(self.moves) and self.moves[i].t_move_begin <= t:
                m = self.moves[i]
                b = min(t1, m.t_move_end)
                yield t, b, m
                t = b
                i += 1
            else:
                nxt = self.moves[i].t_move_begin if i < len(self.moves) else math.inf
                b = min(t1, nxt)
                yield t, b, None
                t = b


def _linear_min(p0: Point, p1: Point, q0: Point, q1: Point, span: float) -> tuple[float, float]:
    """Closest approach of two points moving linearly over [0, span]; returns (dist, tau)."""
    d0x, d0y = p0[0] - q0[0], p0[1] - q0[1]
    vx = (p1[0] - p0[0]) - (q1[0] - q0[0])
    vy = (p1[1] - p0[1]) - (q1[1] - q0[1])
    vv = vx * vx + vy * vy
    if vv == 0.0:
        return math.hypot(d0x, d0y), 0.0
    s = -(d0x * vx + d0y * vy) / vv
    s = min(1.0, max(0.0, s))
    return math.hypot(d0x + s * vx, d0y + s * vy), s * span


def _speed(m: ActivationEvent | None) -> float:
    if m is None or m.t_move_end <= m.t_move_begin:
        return 0.0
    if m.path.kind == "arc":
        r = math.hypot(*m.start)
        sweep = ccw_angle(angle_of(m.start), angle_of(m.end))
        if m.path.direction == "cw":
            sweep = (TWO_PI - sweep) % TWO_PI
        length = r * sweep
    else:
        length = distance(m.start, m.end)
    return length / (m.t_move_end - m.t_move_begin)


def _pos(m: ActivationEvent | None, fixed: Point, t: float) -> Point:
    return fixed if m is None else interpolate(m, t)


def _bb_min(f: Callable[[float], float], a: float, b: float, lip: float, best: float, tol: float) -> tuple[float, float]:
    """Branch and bound minimum of a Lipschitz function on [a, b]."""
    fa, fb = f(a), f(b)
    arg = a if fa <= fb else b
    best = min(best, fa, fb)
    heap = [((fa + fb - lip * (b - a)) / 2.0, a, b, fa, fb)]
    while heap:
        lb, x0, x1, f0, f1 = heapq.heappop(heap)
        if lb >= best - tol or (x1 - x0) * lip <= tol:
            continue
        xm = 0.5 * (x0 + x1)
        fm = f(xm)
        if fm < best:
            best, arg = fm, xm
        for lo, hi, flo, fhi in ((x0, xm, f0, fm), (xm, x1, fm, f1)):
            heapq.heappush(heap, ((flo + fhi - lip * (hi - lo)) / 2.0, lo, hi, flo, fhi))
    return best, arg


def _piece_min(ma, pa: Point, mb, pb: Point, t0: float, t1: float, best: float, eps: float) -> tuple[float, float]:
    if t1 <= t0:
        d = distance(_pos(ma, pa, t0), _pos(mb, pb, t0))
        return d, t0
    arcs = (ma is not None and ma.path.kind == "arc") or (mb is not None and mb.path.kind == "arc")
    if not arcs:
        a0, a1 = _pos(ma, pa, t0), _pos(ma, pa, t1)
        b0, b1 = _pos(mb, pb, t0), _pos(mb, pb, t1)
        d, tau = _linear_min(a0, a1, b0, b1, t1 - t0)
        return d, t0 + tau
    lip = _speed(ma) + _speed(mb)

    def f(t: float) -> float:
        return distance(_pos(ma, pa, t), _pos(mb, pb, t))

    return _bb_min(f, t0, t1, lip, best, eps / 10.0)


def check_no_collision(trace: Trace, eps: float = EPS) -> CollisionReport:
    n = trace.header.n
    initial = [Point(*p) for p in trace.header.initial]
    per_robot: dict[int, list[ActivationEvent]] = defaultdict(list)
    for ev in trace.events:
        if ev.start != ev.end or ev.moves:
            per_robot[ev.robot].append(ev)
    lines = {r: _Timeline(initial[r], sorted(per_robot.get(r, []), key=lambda e: e.t_move_begin)) for r in range(n)}

    best = math.inf
    where: tuple[tuple[int, int], tuple[float, float]] | None = None
    for i in range(n):
        for j in range(i + 1, n):
            d = distance(initial[i], initial[j])
            if d < best:
                best, where = d, ((i, j), (0.0, 0.0))
    for i in range(n):
        for m in lines[i].moves:
            t0, t1 = m.t_move_begin, m.t_move_end
            for j in range(n):
                if j == i:
                    continue
                # pairs where both move are handled once, from the lower id
                for a, b, other in lines[j].pieces(t0, t1) if t1 > t0 else [(t0, t0, None)]:
                    if other is not None and j < i:
                        continue
                    fixed = lines[j].at(a) if other is None else other.end
                    if t1 <= t0:
                        fixed = lines[j].at(t0)
                        d = distance(m.end, fixed)
                        tm = t0
                    else:
                        d, tm = _piece_min(m, m.start, other, fixed, a, b, best, eps)
                    if d < best:
                        best, where = d, (tuple(sorted((i, j))), (a, b))
    if where is None:
        return CollisionReport(best)
    return CollisionReport(best, where[0], where[1], best <= eps)


# ---------------------------------------------------------------- partitions


@dataclass
class PartitionReport:
    type: str
    cells: list
    areas: list[float]
    assignment: dict[int, int]
    uniform: bool
    max_rel_area_error: float
    notes: list[str] = field(default_factory=list)


def _unpack(final) -> tuple[list[Point], list[LightColor]]:
    if hasattr(final, "positions"):
        return [Point(*p) for p in final.positions], list(final.colors)
    positions, colors = final
    return [Point(*p) for p in positions], list(colors)


def _line_layout(region, pts: Sequence[Point], tol: float):
    """(base side, 'I' or 'II') if the points sit on half- or quarter-lines of a side."""
    bases = list(region.long_sides[:1]) if isinstance(region, Rectangle) else ["bottom", "left"]
    diag = []
    for side in bases:
        fr = SideFrame(region, side, tol)
        ys = [fr.local(p)[1] for p in pts]
        H = fr.span
        if all(abs(y - H / 2) <= tol for y in ys):
            return side, "I"
        if all(abs(y - H / 4) <= tol or abs(y - 3 * H / 4) <= tol for y in ys):
            return side, "II"
        diag.append(f"{side}: offsets {sorted(round(y / H, 6) for y in ys)} (fractions of span)")
    raise Unrecognized("; ".join(diag))


def infer_partition_type(final, region: Region, tol: float = 1e-7) -> str:
    pts, colors = _unpack(final)
    if isinstance(region, Circle):
        return "V"
    cs = set(colors)
    if LightColor.FINISH1 in cs:
        if cs != {LightColor.FINISH1}:
            raise Unrecognized(f"mixed colors {sorted(map(str, cs))}")
        return "III"
    if LightColor.FINISH2 in cs:
        if cs != {LightColor.FINISH2}:
            raise Unrecognized(f"mixed colors {sorted(map(str, cs))}")
        return "IV"
    return _line_layout(region, pts, tol)[1]


def _strip_cells(region, side: str, xs: list[float], y0: float, y1: float) -> list[list[Point]]:
    fr = SideFrame(region, side, EPS)
    order = sorted(xs)
    cuts = [0.0] + [(a + b) / 2 for a, b in zip(order, order[1:])] + [fr.length]
    return [
        [fr.world((cuts[k], y0)), fr.world((cuts[k + 1], y0)), fr.world((cuts[k + 1], y1)), fr.world((cuts[k], y1))]
        for k in range(len(order))
    ]


def _strips(region, pts: list[Point], kind: str, tol: float) -> list[list[Point]]:
    side, _ = _line_layout(region, pts, tol)
    fr = SideFrame(region, side, EPS)
    loc = [fr.local(p) for p in pts]
    H = fr.span
    if kind == "I":
        return _strip_cells(region, side, [q[0] for q in loc], 0.0, H)
    low = [q[0] for q in loc if q[1] < H / 2]
    high = [q[0] for q in loc if q[1] > H / 2]
    cells = []
    if low:
        cells += _strip_cells(region, side, low, 0.0, H / 2)
    if high:
        cells += _strip_cells(region, side, high, H / 2, H)
    return cells


class _Perimeter:
    """Arc-length parametrisation of a chain of box corners."""

    def __init__(self, corners: list[Point], closed: bool):
        self.pts = corners + ([corners[0]] if closed else [])
        self.cum = [0.0]
        for a, b in zip(self.pts, self.pts[1:]):
            self.cum.append(self.cum[-1] + distance(a, b))
        self.length = self.cum[-1]
        self.closed = closed

    def param(self, p: Point) -> float:
        best, arg = math.inf, 0.0
        for k, (a, b) in enumerate(zip(self.pts, self.pts[1:])):
            seg = distance(a, b)
            t = ((p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1])) / (seg * seg)
            t = min(1.0, max(0.0, t))
            q = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
            d = distance(p, q)
            if d < best:
                best, arg = d, self.cum[k] + t * seg
        return arg

    def point(self, s: float) -> Point:
        if self.closed:
            s %= self.length
        k = max(0, min(len(self.cum) - 2, bisect.bisect_right(self.cum, s) - 1))
        a, b = self.pts[k], self.pts[k + 1]
        t = (s - self.cum[k]) / (self.cum[k + 1] - self.cum[k])
        return Point(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))

    def chain(self, s0: float, s1: float) -> list[Point]:
        """Boundary points from s0 to s1 (s1 may exceed the length on a closed loop)."""
        out = [self.point(s0)]
        lap = self.length if self.closed else math.inf
        for base in (0.0, lap) if self.closed else (0.0,):
            for k, c in enumerate(self.cum[:-1] if self.closed else self.cum):
                s = c + base
                if s0 + 1e-12 < s < s1 - 1e-12:
                    out.append(self.pts[k])
        out.append(self.point(s1))
        return out


def _fan_cells(apex: Point, per: _Perimeter, pts: list[Point]) -> list[list[Point]]:
    mids = [per.param(Point((3 * g[0] - apex[0]) / 2, (3 * g[1] - apex[1]) / 2)) for g in pts]
    order = sorted(mids)
    n = len(order)
    if per.closed:
        cuts = []
        for k in range(n):
            a, b = order[k], order[(k + 1) % n] + (per.length if k == n - 1 else 0.0)
            cuts.append((a + b) / 2)
        spans = [(cuts[k - 1] - (per.length if k == 0 else 0.0), cuts[k]) for k in range(n)]
    else:
        cuts = [0.0] + [(a + b) / 2 for a, b in zip(order, order[1:])] + [per.length]
        spans = [(cuts[k], cuts[k + 1]) for k in range(n)]
    return [[apex] + per.chain(s0, s1) for s0, s1 in spans]


def _assign(cells: list, pts: list[Point], inside: Callable) -> dict[int, int]:
    assignment: dict[int, int] = {}
    for ci, cell in enumerate(cells):
        hits = []
        for ri, p in enumerate(pts):
            where = inside(p, cell)
            if where == "boundary":
                raise RobotOnCellBoundary(f"robot {ri} lies on the boundary of cell {ci}")
            if where == "inside":
                hits.append(ri)
        if len(hits) != 1:
            raise CountMismatch(f"cell {ci} holds {len(hits)} robots")
        assignment[hits[0]] = ci
    if len(assignment) != len(pts):
        raise CountMismatch("some robot lies in no cell")
    return assignment


def _in_poly(p, cell) -> str:
    return point_in_polygon(p, cell, 1e-12)


def _fan_vertex_candidates(region: Square, pts: list[Point]) -> list[Point]:
    corners = region.corners()
    score = [min(distance(c, p) for p in pts) for c in corners]
    order = sorted(range(4), key=lambda k: -score[k])
    return [corners[k] for k in order]


def build_partition(final, region: Region, ptype: str | None = None, tol: float = 1e-7) -> PartitionReport:
    pts, _ = _unpack(final)
    n = len(pts)
    if ptype is None:
        ptype = infer_partition_type(final, region, tol)
    target = region_area(region) / n
    notes: list[str] = []

    if ptype == "V":
        if not isinstance(region, Circle):
            raise Unrecognized("sectors need a circle")
        angs = sorted((angle_of(p), k) for k, p in enumerate(pts))
        cells, assignment = [], {}
        for idx, (a, k) in enumerate(angs):
            prev = angs[idx - 1][0]
            nxt = angs[(idx + 1) % n][0]
            half_l = ccw_angle(prev, a) / 2 if n > 1 else math.pi
            half_r = ccw_angle(a, nxt) / 2 if n > 1 else math.pi
            cells.append(("sector", a - half_l, a + half_r, region.radius))
            r = math.hypot(*pts[k])
            if not (0 < r < region.radius) or half_l <= 0 or half_r <= 0:
                raise RobotOnCellBoundary(f"robot {k} is not strictly inside its sector")
            assignment[k] = idx
        areas = [(c[2] - c[1]) * c[3] ** 2 / 2 for c in cells]
    elif ptype in ("I", "II"):
        cells = _strips(region, pts, ptype, tol)
        assignment = _assign(cells, pts, _in_poly)
        areas = [polygon_area(c) for c in cells]
    elif ptype in ("III", "IV"):
        if not isinstance(region, Square):
            raise Unrecognized("fan partitions need a square")
        if ptype == "IV":
            cells = _fan_cells(region.center, _Perimeter(region.corners(), True), pts)
            assignment = _assign(cells, pts, _in_poly)
        else:
            corners = region.corners()
            last: Exception | None = None
            for v in _fan_vertex_candidates(region, pts):
                k = corners.index(v)
                # path over the two sides away from v: next corner, opposite corner, previous corner
                chain = [corners[(k + 1) % 4], corners[(k + 2) % 4], corners[(k + 3) % 4]]
                try:
                    cells = _fan_cells(v, _Perimeter(chain, False), pts)
                    assignment = _assign(cells, pts, _in_poly)
                    break
                except (CountMismatch, RobotOnCellBoundary) as exc:
                    last = exc
                    notes.append(f"vertex {tuple(v)} rejected: {exc}")
            else:
                raise last if last else Unrecognized("no fan vertex")
        areas = [polygon_area(c) for c in cells]
    else:
        raise Unrecognized(f"unknown type {ptype!r}")

    err = max(abs(a - target) / target for a in areas)
    total = sum(areas)
    if abs(total - region_area(region)) > 1e-6 * region_area(region):
        notes.append(f"cells cover {total}, region {region_area(region)}")
    return PartitionReport(ptype, cells, areas, assignment, err <= 1e-6, err, notes)


# ------------------------------------------------------------ colors, epochs


def color_usage(trace: Trace) -> set[LightColor]:
    used = set(trace.header.initial_colors)
    for ev in trace.events:
        used.add(ev.color_before)
        used.add(ev.color_after)
    used.update(trace.final.colors)
    return used


@dataclass
class EpochReport:
    ok: bool
    per_n_max: dict[int, int]
    violations: list[tuple[int, int, int]]  # (N, epochs, bound)


def epoch_bound_check(traces: Iterable[Trace], bound: Callable[[int], int]) -> EpochReport:
    per_n: dict[int, int] = {}
    bad = []
    for tr in traces:
        n, e = tr.header.n, tr.final.epochs
        per_n[n] = max(per_n.get(n, 0), e)
        if e > bound(n):
            bad.append((n, e, bound(n)))
    return EpochReport(not bad, dict(sorted(per_n.items())), bad)


def fit_linear_envelope(per_n_max: dict[int, int]) -> tuple[float, float]:
    """Smallest-slope line a*N + b with a, b >= 0 lying on or above every point."""
    items = sorted(per_n_max.items())
    if not items:
        return 0.0, 0.0
    best = None
    # the optimal envelope passes through one point with slope set by another
    slopes = {0.0}
    for (n1, e1) in items:
        for (n2, e2) in items:
            if n2 > n1:
                slopes.add(max(0.0, (e2 - e1) / (n2 - n1)))
    for a in sorted(slopes):
        b = max(0.0, max(e - a * n for n, e in items))
        area = sum(a * n + b - e for n, e in items)
        if best is None or area < best[0]:
            best = (area, a, b)
    return best[1], best[2]
