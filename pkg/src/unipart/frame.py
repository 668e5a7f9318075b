"""Side-anchored local coordinates for box regions.

A ``SideFrame`` maps a box so that the chosen side becomes the local x-axis
(``y = 0``) with the interior above it. Local x runs from 0 to the side
length; local y runs from 0 to the span between the side and its opposite.
The map is a rigid motion, so distances and collinearity are preserved.
"""

from __future__ import annotations

from typing import Sequence

from .geometry import Point
from .model import OPPOSITE, Snapshot, _Box


class SideFrame:
    __slots__ = ("region", "side", "ox", "oy", "ux", "uy", "length", "span", "eps")

    def __init__(self, region: _Box, side: str, eps: float):
        self.region = region
        self.side = side
        a, b = region.side_segment(side)
        self.ox, self.oy = a
        self.length = region.side_length(side)
        self.span = region.span(side)
        self.ux = ((b[0] - a[0]) / self.length, (b[1] - a[1]) / self.length)
        self.uy = region.inward_normal(side)
        self.eps = eps

    def local(self, p: Sequence[float]) -> Point:
        dx, dy = p[0] - self.ox, p[1] - self.oy
        return Point(dx * self.ux[0] + dy * self.ux[1], dx * self.uy[0] + dy * self.uy[1])

    def world(self, q: Sequence[float]) -> Point:
        return Point(
            self.ox + q[0] * self.ux[0] + q[1] * self.uy[0],
            self.oy + q[0] * self.ux[1] + q[1] * self.uy[1],
        )

    @property
    def opposite(self) -> str:
        return OPPOSITE[self.side]

    def low_end_side(self) -> str:
        """The side meeting this one at local x = 0."""
        a, _ = self.region.side_segment(self.side)
        for s in ("bottom", "right", "top", "left"):
            if s in (self.side, self.opposite):
                continue
            if abs(self.region.depth(s, a)) <= 1e-12:
                return s
        raise AssertionError("unreachable")

    def high_end_side(self) -> str:
        low = self.low_end_side()
        return OPPOSITE[low]


class LocalView:
    """A snapshot expressed in a side frame."""

    __slots__ = ("frame", "me", "others", "eps", "L", "H")

    def __init__(self, snap: Snapshot, frame: SideFrame):
        self.frame = frame
        self.eps = snap.eps
        self.me = frame.local(snap.self_position)
        self.others = [(frame.local(s.position), s.color) for s in snap.visible]
        self.L = frame.length
        self.H = frame.span

    # predicates on local points
    def on_base(self, p) -> bool:
        return abs(p[1]) <= self.eps

    def on_top(self, p) -> bool:
        return abs(p[1] - self.H) <= self.eps

    def on_ends(self, p) -> bool:
        return p[0] <= self.eps or p[0] >= self.L - self.eps

    def on_line(self, p, y: float) -> bool:
        return abs(p[1] - y) <= self.eps

    def in_y(self, p, lo: float, hi: float, closure: str = "[]") -> bool:
        e = self.eps
        ok_lo = p[1] >= lo - e if closure[0] == "[" else p[1] > lo + e
        ok_hi = p[1] <= hi + e if closure[1] == "]" else p[1] < hi - e
        return ok_lo and ok_hi

    def is_interior(self, p) -> bool:
        e = self.eps
        return e < p[0] < self.L - e and e < p[1] < self.H - e
