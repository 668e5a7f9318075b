"""Regions, light colors, snapshots and the action vocabulary."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

from .geometry import EPS, Point, distance, strictly_between


class ConfigError(ValueError):
    """Invalid region or run configuration."""


class OutsideRegion(ValueError):
    pass


# ------------------------------------------------------------------- regions

SIDES = ("bottom", "right", "top", "left")
OPPOSITE = {"bottom": "top", "top": "bottom", "left": "right", "right": "left"}
_NORMALS = {"bottom": (0.0, 1.0), "top": (0.0, -1.0), "left": (1.0, 0.0), "right": (-1.0, 0.0)}
# corner id -> the two sides meeting there
CORNER_SIDES = {"bl": ("bottom", "left"), "br": ("bottom", "right"), "tr": ("top", "right"), "tl": ("top", "left")}


@dataclass(frozen=True)
class _Box:
    """Axis-aligned box with its lower-left corner at the origin."""

    @property
    def width(self) -> float:  # pragma: no cover - overridden
        raise NotImplementedError

    @property
    def height(self) -> float:  # pragma: no cover - overridden
        raise NotImplementedError

    def corner(self, cid: str) -> Point:
        w, h = self.width, self.height
        return {"bl": Point(0.0, 0.0), "br": Point(w, 0.0), "tr": Point(w, h), "tl": Point(0.0, h)}[cid]

    def corners(self) -> list[Point]:
        return [self.corner(c) for c in ("bl", "br", "tr", "tl")]

    def side_segment(self, side: str) -> tuple[Point, Point]:
        """Endpoints of a side, listed counter-clockwise around the box."""
        w, h = self.width, self.height
        if side == "bottom":
            return Point(0.0, 0.0), Point(w, 0.0)
        if side == "right":
            return Point(w, 0.0), Point(w, h)
        if side == "top":
            return Point(w, h), Point(0.0, h)
        if side == "left":
            return Point(0.0, h), Point(0.0, 0.0)
        raise KeyError(side)

    def side_corners(self, side: str) -> tuple[str, str]:
        return {"bottom": ("bl", "br"), "right": ("br", "tr"), "top": ("tr", "tl"), "left": ("tl", "bl")}[side]

    def inward_normal(self, side: str) -> tuple[float, float]:
        return _NORMALS[side]

    def span(self, side: str) -> float:
        return self.height if side in ("bottom", "top") else self.width

    def side_length(self, side: str) -> float:
        return self.width if side in ("bottom", "top") else self.height

    def depth(self, side: str, p: Sequence[float]) -> float:
        """Distance of p from ``side`` measured into the box."""
        if side == "bottom":
            return p[1]
        if side == "top":
            return self.height - p[1]
        if side == "left":
            return p[0]
        return self.width - p[0]

    def contains(self, p: Sequence[float], eps: float = EPS) -> bool:
        return -eps <= p[0] <= self.width + eps and -eps <= p[1] <= self.height + eps

    @property
    def center(self) -> Point:
        return Point(self.width / 2.0, self.height / 2.0)


@dataclass(frozen=True)
class Rectangle(_Box):
    w: float
    h: float

    def __post_init__(self) -> None:
        if not (self.w > 0 and self.h > 0) or not (math.isfinite(self.w) and math.isfinite(self.h)):
            raise ConfigError("rectangle dimensions must be positive")
        if abs(self.w - self.h) <= EPS:
            raise ConfigError("rectangle must not be square")

    @property
    def width(self) -> float:
        return self.w

    @property
    def height(self) -> float:
        return self.h

    @property
    def long_sides(self) -> tuple[str, str]:
        return ("bottom", "top") if self.w > self.h else ("left", "right")

    @property
    def short_sides(self) -> tuple[str, str]:
        return ("left", "right") if self.w > self.h else ("bottom", "top")


@dataclass(frozen=True)
class Square(_Box):
    side: float

    def __post_init__(self) -> None:
        if not (self.side > 0 and math.isfinite(self.side)):
            raise ConfigError("square side must be positive")

    @property
    def width(self) -> float:
        return self.side

    @property
    def height(self) -> float:
        return self.side


@dataclass(frozen=True)
class Circle:
    radius: float

    def __post_init__(self) -> None:
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ConfigError("circle radius must be positive")

    @property
    def center(self) -> Point:
        return Point(0.0, 0.0)

    def contains(self, p: Sequence[float], eps: float = EPS) -> bool:
        return math.hypot(p[0], p[1]) <= self.radius + eps


Region = Union[Rectangle, Square, Circle]


def region_area(region: Region) -> float:
    if isinstance(region, Circle):
        return math.pi * region.radius**2
    return region.width * region.height


def region_kind(region: Region) -> str:
    return {Rectangle: "rect", Square: "square", Circle: "circle"}[type(region)]


# -------------------------------------------------------------------- colors


class LightColor(str, enum.Enum):
    OFF = "OFF"
    FINISH = "FINISH"
    MONITOR = "MONITOR"
    FINISH1 = "FINISH1"
    FINISH2 = "FINISH2"
    HEAD = "HEAD"
    TAIL = "TAIL"
    MID = "MID"
    MOVE_H = "MOVE_H"
    HALF = "HALF"
    FULL = "FULL"

    def __str__(self) -> str:
        return self.value


C = LightColor
RECT_COLORS = frozenset({C.OFF, C.FINISH})
SQUARE_COLORS = frozenset({C.OFF, C.MONITOR, C.FINISH, C.FINISH1, C.FINISH2})
CIRCLE_COLORS = frozenset({C.OFF, C.HEAD, C.TAIL, C.MID, C.MOVE_H, C.HALF, C.FULL, C.FINISH})


# -------------------------------------------------------- robots and actions


@dataclass(frozen=True)
class RobotState:
    id: int
    position: Point
    color: LightColor = C.OFF


class Seen(NamedTuple):
    position: Point
    color: LightColor


@dataclass(frozen=True)
class Snapshot:
    self_position: Point
    self_color: LightColor
    region: Region
    visible: tuple[Seen, ...]
    tie_seed: int = 0
    eps: float = EPS

    def tie(self, n: int, salt: int = 0) -> int:
        """Deterministic choice among n options for this activation."""
        return ((self.tie_seed ^ (salt * 0x9E3779B1)) >> 3) % n


class Path(NamedTuple):
    kind: str = "segment"  # "segment" | "arc"
    direction: str | None = None  # "cw" | "ccw" for arcs


SEGMENT = Path("segment", None)


def arc_path(direction: str) -> Path:
    if direction not in ("cw", "ccw"):
        raise ValueError(direction)
    return Path("arc", direction)


@dataclass(frozen=True)
class Stay:
    color: LightColor


@dataclass(frozen=True)
class MoveTo:
    color: LightColor
    target: Point
    path: Path = field(default=SEGMENT)


@dataclass(frozen=True)
class Terminated:
    pass


Action = Union[Stay, MoveTo, Terminated]


# ------------------------------------------------------------ observation


def is_occluded(observer: Sequence[float], target: Sequence[float], blocker: Sequence[float], eps: float = EPS) -> bool:
    return strictly_between(blocker, observer, target, eps)


def compute_snapshot(
    robots: Sequence[RobotState], observer_id: int, region: Region, tie_seed: int = 0, eps: float = EPS
) -> Snapshot:
    me = next((r for r in robots if r.id == observer_id), None)
    if me is None:
        raise KeyError(f"unknown observer {observer_id}")
    o = me.position
    others = [r for r in robots if r.id != observer_id]
    visible = []
    for r in others:
        hidden = False
        for b in others:
            if b is not r and is_occluded(o, r.position, b.position, eps):
                hidden = True
                break
        if not hidden:
            visible.append(Seen(r.position, r.color))
    visible.sort(key=lambda s: (s.position.x, s.position.y))
    return Snapshot(o, me.color, region, tuple(visible), tie_seed, eps)


@dataclass(frozen=True)
class Placement:
    kind: str  # "interior" | "boundary" | "corner"
    where: str | None = None  # side id, corner id, or "arc"


def classify_position(region: Region, p: Sequence[float], eps: float = EPS) -> Placement:
    if isinstance(region, Circle):
        r = math.hypot(p[0], p[1])
        if r > region.radius + eps:
            raise OutsideRegion(f"{tuple(p)} lies outside the circle")
        if r >= region.radius - eps:
            return Placement("boundary", "arc")
        return Placement("interior")
    if not region.contains(p, eps):
        raise OutsideRegion(f"{tuple(p)} lies outside the region")
    for cid, (s1, s2) in CORNER_SIDES.items():
        if abs(region.depth(s1, p)) <= eps and abs(region.depth(s2, p)) <= eps:
            return Placement("corner", cid)
    for side in SIDES:
        if abs(region.depth(side, p)) <= eps:
            return Placement("boundary", side)
    return Placement("interior")
