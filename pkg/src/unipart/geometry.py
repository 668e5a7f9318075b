"""Planar geometry kernel used by the simulator and the partition audits.

Everything here is a pure function over immutable values. Coincidence,
on-line and on-circle predicates share one absolute tolerance ``EPS``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

EPS = 1e-9
TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    pass


class NotAVertex(GeometryError):
    pass


class BadFraction(GeometryError):
    pass


class NotOnCircle(GeometryError):
    pass


class SelfIntersecting(GeometryError):
    pass


class Point(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])

    def scale(self, k: float) -> "Point":
        return Point(self.x * k, self.y * k)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


class Segment(NamedTuple):
    a: Point
    b: Point

    def length(self) -> float:
        return distance(self.a, self.b)

    def at(self, t: float) -> Point:
        return lerp(self.a, self.b, t)


@dataclass(frozen=True)
class FractionLine:
    side: str
    k: float
    segment: Segment


def distance(p: Sequence[float], q: Sequence[float]) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def lerp(p: Sequence[float], q: Sequence[float], t: float) -> Point:
    return Point(p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t)


def cross(o: Sequence[float], a: Sequence[float], b: Sequence[float]) -> float:
    """z-component of (a - o) x (b - o); positive for a left turn."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def same_point(p: Sequence[float], q: Sequence[float], eps: float = EPS) -> bool:
    return distance(p, q) <= eps


def line_distance(p: Sequence[float], a: Sequence[float], b: Sequence[float]) -> float:
    """Distance from p to the infinite line through a and b."""
    length = distance(a, b)
    if length == 0.0:
        return distance(p, a)
    return abs(cross(a, b, p)) / length


def side_of_line(p: Sequence[float], a: Sequence[float], b: Sequence[float], eps: float = EPS) -> int:
    """+1 left of a->b, -1 right, 0 within eps of the line."""
    length = distance(a, b)
    c = cross(a, b, p) / length if length else 0.0
    if c > eps:
        return 1
    if c < -eps:
        return -1
    return 0


def foot_of_perpendicular(p: Sequence[float], s: Segment) -> Point:
    ax, ay = s.a
    dx, dy = s.b[0] - ax, s.b[1] - ay
    denom = dx * dx + dy * dy
    if denom == 0.0:
        return Point(ax, ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / denom
    return Point(ax + t * dx, ay + t * dy)


def on_segment(p: Sequence[float], a: Sequence[float], b: Sequence[float], eps: float = EPS) -> bool:
    """True if p lies on the closed segment a-b (within eps)."""
    if line_distance(p, a, b) > eps:
        return False
    dx, dy = b[0] - a[0], b[1] - a[1]
    length = math.hypot(dx, dy)
    if length == 0.0:
        return distance(p, a) <= eps
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / length
    return -eps <= t <= length + eps


def strictly_between(p: Sequence[float], a: Sequence[float], b: Sequence[float], eps: float = EPS) -> bool:
    """True if p lies on the open segment a-b, away from both endpoints."""
    if line_distance(p, a, b) > eps:
        return False
    dx, dy = b[0] - a[0], b[1] - a[1]
    length = math.hypot(dx, dy)
    if length == 0.0:
        return False
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / length
    return eps < t < length - eps


def line_intersection(
    p1: Sequence[float], p2: Sequence[float], q1: Sequence[float], q2: Sequence[float]
) -> Point | None:
    """Intersection of the infinite lines p1p2 and q1q2, or None if parallel."""
    d1x, d1y = p2[0] - p1[0], p2[1] - p1[1]
    d2x, d2y = q2[0] - q1[0], q2[1] - q1[1]
    denom = d1x * d2y - d1y * d2x
    if abs(denom) < 1e-15:
        return None
    t = ((q1[0] - p1[0]) * d2y - (q1[1] - p1[1]) * d2x) / denom
    return Point(p1[0] + t * d1x, p1[1] + t * d1y)


def segments_intersect(a: Point, b: Point, c: Point, d: Point, eps: float = EPS) -> bool:
    """Closed-segment intersection test."""
    o1 = side_of_line(c, a, b, eps)
    o2 = side_of_line(d, a, b, eps)
    o3 = side_of_line(a, c, d, eps)
    o4 = side_of_line(b, c, d, eps)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return (
        (o1 == 0 and on_segment(c, a, b, eps))
        or (o2 == 0 and on_segment(d, a, b, eps))
        or (o3 == 0 and on_segment(a, c, d, eps))
        or (o4 == 0 and on_segment(b, c, d, eps))
    )


# --------------------------------------------------------------------- hulls


def convex_hull(points: Iterable[Sequence[float]], eps: float = EPS) -> list[Point]:
    """CCW hull starting at the lexicographically smallest vertex.

    Collinear boundary points are dropped; a collinear input returns the two
    chain endpoints and a single distinct point returns itself.
    """
    pts: list[Point] = []
    for p in sorted(Point(float(q[0]), float(q[1])) for q in points):
        if not pts or not same_point(pts[-1], p, eps):
            pts.append(p)
    if len(pts) <= 2:
        return pts

    def build(seq: list[Point]) -> list[Point]:
        chain: list[Point] = []
        for p in seq:
            while len(chain) >= 2 and side_of_line(p, chain[-2], chain[-1], eps) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = build(pts)
    upper = build(list(reversed(pts)))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:
        return [pts[0], pts[-1]]
    start = min(range(len(hull)), key=lambda i: hull[i])
    return hull[start:] + hull[:start]


def hull_neighbors(hull: Sequence[Point], v: Sequence[float], eps: float = EPS) -> tuple[Point, Point]:
    """The (previous, next) vertices of v on a CCW hull."""
    for i, h in enumerate(hull):
        if same_point(h, v, eps):
            n = len(hull)
            if n == 1:
                raise NotAVertex("a one-point hull has no neighbours")
            if n == 2:
                other = hull[1 - i]
                return other, other
            return hull[i - 1], hull[(i + 1) % n]
    raise NotAVertex(f"{tuple(v)} is not a hull vertex")


# ---------------------------------------------------------- lines and bands


def fraction_line(region, side: str, k: float) -> FractionLine:
    """Segment parallel to ``side`` at k times the side-to-opposite distance."""
    if not 0.0 < k < 1.0:
        raise BadFraction(f"fraction must lie strictly between 0 and 1, got {k}")
    a, b = region.side_segment(side)
    inward = region.inward_normal(side)
    depth = k * region.span(side)
    shift = Point(inward[0] * depth, inward[1] * depth)
    return FractionLine(side, k, Segment(Point(*a) + shift, Point(*b) + shift))


def side_depth(region, side: str, p: Sequence[float]) -> float:
    """Signed distance of p from ``side`` measured into the region."""
    a, _ = region.side_segment(side)
    n = region.inward_normal(side)
    return (p[0] - a[0]) * n[0] + (p[1] - a[1]) * n[1]


def in_band(
    p: Sequence[float], region, side: str, k1: float, k2: float, closure: str = "[]", eps: float = EPS
) -> bool:
    """Membership of p in the band between the k1- and k2-lines of ``side``.

    ``closure`` is a two-character string such as ``"[]"``, ``"(]"``,
    ``"[)"`` or ``"()"``.
    """
    if len(closure) != 2 or closure[0] not in "[(" or closure[1] not in "])":
        raise ValueError(f"bad closure {closure!r}")
    span = region.span(side)
    depth = side_depth(region, side, p)
    lo, hi = k1 * span, k2 * span
    lo_ok = depth >= lo - eps if closure[0] == "[" else depth > lo + eps
    hi_ok = depth <= hi + eps if closure[1] == "]" else depth < hi - eps
    return lo_ok and hi_ok


# --------------------------------------------------------------------- arcs


def angle_of(p: Sequence[float]) -> float:
    """Polar angle in [0, 2*pi)."""
    a = math.atan2(p[1], p[0])
    return a + TWO_PI if a < 0 else a


def _check_on_circle(radius: float, p: Sequence[float], eps: float) -> None:
    if abs(math.hypot(p[0], p[1]) - radius) > eps * max(1.0, radius):
        raise NotOnCircle(f"{tuple(p)} is not on the circle of radius {radius}")


def ccw_angle(a_from: float, a_to: float) -> float:
    """Angle swept going counter-clockwise from a_from to a_to, in [0, 2*pi)."""
    d = (a_to - a_from) % TWO_PI
    return 0.0 if d >= TWO_PI else d


def arc_length(radius: float, a: Sequence[float], b: Sequence[float], direction: str = "ccw", eps: float = EPS) -> float:
    _check_on_circle(radius, a, eps)
    _check_on_circle(radius, b, eps)
    if distance(a, b) <= eps:
        return 0.0
    sweep = ccw_angle(angle_of(a), angle_of(b))
    if direction == "cw":
        sweep = (TWO_PI - sweep) % TWO_PI
    elif direction != "ccw":
        raise ValueError(f"direction must be 'cw' or 'ccw', got {direction!r}")
    return radius * sweep


def point_at_angle(radius: float, theta: float) -> Point:
    return Point(radius * math.cos(theta), radius * math.sin(theta))


def point_on_arc_at(radius: float, start: Sequence[float], direction: str, length: float, eps: float = EPS) -> Point:
    _check_on_circle(radius, start, eps)
    if length == 0.0:
        return Point(float(start[0]), float(start[1]))
    sign = 1.0 if direction == "ccw" else -1.0
    return point_at_angle(radius, angle_of(start) + sign * length / radius)


# ------------------------------------------------------------------ polygons


def triangle_centroid(a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> Point:
    return Point((a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0)


def signed_area(vertices: Sequence[Sequence[float]]) -> float:
    n = len(vertices)
    s = 0.0
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def polygon_area(vertices: Sequence[Sequence[float]], eps: float = EPS) -> float:
    """Shoelace area of a simple polygon (vertex order may be either way)."""
    n = len(vertices)
    if n < 3:
        return 0.0
    if n <= 64:
        pts = [Point(float(v[0]), float(v[1])) for v in vertices]
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                if segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n], eps):
                    raise SelfIntersecting(f"edges {i} and {j} cross")
    return abs(signed_area(vertices))


def point_in_polygon(p: Sequence[float], vertices: Sequence[Sequence[float]], eps: float = EPS) -> str:
    """'inside', 'boundary' or 'outside' for a convex or simple polygon."""
    n = len(vertices)
    for i in range(n):
        if on_segment(p, vertices[i], vertices[(i + 1) % n], eps):
            return "boundary"
    inside = False
    x, y = p[0], p[1]
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xi > x:
                inside = not inside
    return "inside" if inside else "outside"
