"""Event-driven Look-Compute-Move engine with trace recording.

Compute happens at the Look instant and the new light is shown from the
start of the move, which is the Look instant for every schedule here.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

from .geometry import EPS, TWO_PI, Point, angle_of, ccw_angle, distance, point_at_angle
from .model import (
    Action,
    Circle,
    ConfigError,
    LightColor,
    MoveTo,
    Path,
    Region,
    RobotState,
    SEGMENT,
    Snapshot,
    Stay,
    Terminated,
    compute_snapshot,
)

Algorithm = Callable[[Snapshot], Action]


class SchedulerError(RuntimeError):
    pass


class UnknownRobot(KeyError):
    pass


class MaxEpochsExceeded(SchedulerError):
    def __init__(self, trace: "Trace"):
        super().__init__(f"run did not terminate within {trace.final.epochs} epochs")
        self.trace = trace


# ------------------------------------------------------------ schedule kinds


@dataclass(frozen=True)
class FSync:
    pass


@dataclass(frozen=True)
class SSync:
    p: float

    def __post_init__(self) -> None:
        if not 0.0 < self.p <= 1.0:
            raise ValueError("activation probability must lie in (0, 1]")


@dataclass(frozen=True)
class RandomAsync:
    max_gap: float
    max_move_duration: float

    def __post_init__(self) -> None:
        if not (self.max_gap > 0 and self.max_move_duration > 0):
            raise ValueError("max_gap and max_move_duration must be positive")
        if self.max_move_duration > self.max_gap:
            raise ValueError("max_move_duration may not exceed max_gap")


@dataclass(frozen=True)
class Sequential:
    """One robot active at a time; each round visits every robot in random order."""


@dataclass(frozen=True)
class ReplayEntry:
    robot: int
    t_look: float
    t_move_begin: float
    t_move_end: float


@dataclass(frozen=True)
class Replay:
    events: tuple[ReplayEntry, ...]


SchedulerKind = Union[FSync, SSync, RandomAsync, Sequential, Replay]


# ---------------------------------------------------------------- the trace


@dataclass(frozen=True)
class ActivationEvent:
    robot: int
    t_look: float
    t_move_begin: float
    t_move_end: float
    color_before: LightColor
    color_after: LightColor
    start: Point
    end: Point
    path: Path = SEGMENT
    terminated: bool = False

    @property
    def moves(self) -> bool:
        return self.t_move_end > self.t_move_begin


@dataclass(frozen=True)
class TraceHeader:
    region: Region
    n: int
    seed: int
    scheduler: SchedulerKind
    algorithm: str
    eps: float
    initial: tuple[Point, ...]
    initial_colors: tuple[LightColor, ...]


@dataclass(frozen=True)
class TraceFinal:
    positions: tuple[Point, ...]
    colors: tuple[LightColor, ...]
    terminated: bool
    epochs: int
    max_epochs_exceeded: bool = False


@dataclass(frozen=True)
class Trace:
    header: TraceHeader
    events: tuple[ActivationEvent, ...]
    final: TraceFinal

    def robot_events(self, robot: int) -> list[ActivationEvent]:
        return [e for e in self.events if e.robot == robot]


# ------------------------------------------------------------------ motion


def interpolate(ev: ActivationEvent, t: float) -> Point:
    """Position of the moving robot of ``ev`` at time t."""
    if t <= ev.t_move_begin:
        return ev.start
    if t >= ev.t_move_end:
        return ev.end
    f = (t - ev.t_move_begin) / (ev.t_move_end - ev.t_move_begin)
    if ev.path.kind == "arc":
        radius = math.hypot(ev.start[0], ev.start[1])
        a0 = angle_of(ev.start)
        sweep = ccw_angle(a0, angle_of(ev.end))
        if ev.path.direction == "cw":
            sweep = -((TWO_PI - sweep) % TWO_PI)
        return point_at_angle(radius, a0 + f * sweep)
    return Point(ev.start[0] + (ev.end[0] - ev.start[0]) * f, ev.start[1] + (ev.end[1] - ev.start[1]) * f)


def position_at(trace: Trace, robot: int, t: float) -> Point:
    if not 0 <= robot < trace.header.n:
        raise UnknownRobot(robot)
    pos = trace.header.initial[robot]
    for ev in trace.events:
        if ev.robot != robot:
            continue
        if ev.t_move_begin > t:
            break
        pos = interpolate(ev, t)
    return pos


# ------------------------------------------------------------------ epochs


class EpochCounter:
    """Greedy cover of the timeline by epochs.

    An epoch starting at T closes once every robot still running at T has
    completed a cycle whose Look is at or after T; the close time is the
    latest of those completions.
    """

    def __init__(self, n: int):
        self.alive = set(range(n))
        self.start = -math.inf
        self.done: dict[int, float] = {}
        self.closed = 0

    def feed(self, ev: ActivationEvent) -> None:
        if ev.t_look >= self.start and ev.robot in self.alive and ev.robot not in self.done:
            self.done[ev.robot] = ev.t_move_end
        if ev.terminated:
            self.alive.discard(ev.robot)
        if self.alive and all(r in self.done for r in self.alive):
            self.start = max(self.done[r] for r in self.alive)
            self.closed += 1
            self.done = {}
        elif not self.alive and self.done:
            self.closed += 1
            self.done = {}

    @property
    def count(self) -> int:
        return self.closed + (1 if self.done else 0)


def epochs(trace: Trace) -> int:
    counter = EpochCounter(trace.header.n)
    for ev in sorted(trace.events, key=lambda e: (e.t_look, e.robot)):
        counter.feed(ev)
    return counter.count


# ------------------------------------------------------------------ engine


def _mix(*values: int) -> int:
    """splitmix64-style hash used for per-activation tie seeds."""
    h = 0x9E3779B97F4A7C15
    for v in values:
        h = (h ^ (v & 0xFFFFFFFFFFFFFFFF)) * 0xBF58476D1CE4E5B9 & 0xFFFFFFFFFFFFFFFF
        h = (h ^ (h >> 27)) * 0x94D049BB133111EB & 0xFFFFFFFFFFFFFFFF
        h ^= h >> 31
    return h


class _Robot:
    __slots__ = ("id", "pos", "color", "terminated", "moving", "activations")

    def __init__(self, rid: int, pos: Point, color: LightColor):
        self.id = rid
        self.pos = pos
        self.color = color
        self.terminated = False
        self.moving: ActivationEvent | None = None
        self.activations = 0

    def at(self, t: float) -> Point:
        mv = self.moving
        if mv is None:
            return self.pos
        if t >= mv.t_move_end:
            self.pos = mv.end
            self.moving = None
            return self.pos
        return interpolate(mv, t)


def _algo_name(algorithm) -> str:
    return getattr(algorithm, "algorithm_name", getattr(algorithm, "__name__", "custom"))


class Engine:
    def __init__(self, region: Region, initial, algorithm: Algorithm, seed: int, eps: float):
        self.region = region
        self.algorithm = algorithm
        self.seed = seed
        self.eps = eps
        self.robots: list[_Robot] = []
        for i, item in enumerate(initial):
            if isinstance(item, RobotState):
                pos, color = item.position, item.color
            elif len(item) == 2 and not isinstance(item[0], (int, float)):
                pos, color = item[0], item[1]
            else:
                pos, color = item, LightColor.OFF
            p = Point(float(pos[0]), float(pos[1]))
            if not region.contains(p, eps):
                raise ConfigError(f"robot {i} at {p} lies outside the region")
            if any(distance(p, r.pos) <= eps for r in self.robots):
                raise ConfigError(f"robot {i} coincides with another robot")
            self.robots.append(_Robot(i, p, LightColor(color)))
        self.events: list[ActivationEvent] = []
        self.counter = EpochCounter(len(self.robots))

    def look(self, rid: int, t_look: float) -> tuple[Point, Action]:
        robot = self.robots[rid]
        states = [RobotState(r.id, r.at(t_look), r.color) for r in self.robots]
        tie = _mix(self.seed, rid, robot.activations)
        snap = compute_snapshot(states, rid, self.region, tie, self.eps)
        return states[rid].position, self.algorithm(snap)

    def apply(self, rid: int, t_look: float, start: Point, action: Action, duration: float) -> ActivationEvent:
        robot = self.robots[rid]
        robot.activations += 1
        before = robot.color
        if isinstance(action, Terminated):
            ev = ActivationEvent(rid, t_look, t_look, t_look, before, before, start, start, SEGMENT, True)
            robot.terminated = True
        elif isinstance(action, Stay):
            ev = ActivationEvent(rid, t_look, t_look, t_look, before, action.color, start, start)
            robot.color = action.color
        elif isinstance(action, MoveTo):
            target = Point(float(action.target[0]), float(action.target[1]))
            if not self.region.contains(target, 10 * self.eps):
                raise SchedulerError(f"target {target} lies outside the region")
            if isinstance(self.region, Circle) and action.path.kind == "arc":
                target = point_at_angle(self.region.radius, angle_of(target))
            ev = ActivationEvent(rid, t_look, t_look, t_look + duration, before, action.color, start, target, action.path)
            robot.color = action.color
            robot.moving = ev
        else:  # pragma: no cover - defensive
            raise SchedulerError(f"unknown action {action!r}")
        self.events.append(ev)
        self.counter.feed(ev)
        return ev

    def activate(self, rid: int, t_look: float, duration: float) -> ActivationEvent:
        start, action = self.look(rid, t_look)
        return self.apply(rid, t_look, start, action, duration)

    @property
    def all_terminated(self) -> bool:
        return all(r.terminated for r in self.robots)

    def trace(self, header: TraceHeader, exceeded: bool) -> Trace:
        t_end = max((e.t_move_end for e in self.events), default=0.0)
        positions = tuple(r.at(t_end) for r in self.robots)
        final = TraceFinal(
            positions,
            tuple(r.color for r in self.robots),
            self.all_terminated,
            self.counter.count,
            exceeded,
        )
        return Trace(header, tuple(self.events), final)


def run(
    region: Region,
    initial: Sequence,
    algorithm: Algorithm,
    sched: SchedulerKind,
    seed: int = 0,
    max_epochs: int = 10_000,
    eps: float = EPS,
    strict: bool = True,
) -> Trace:
    """Run the algorithm until every robot has terminated.

    With ``strict`` a run that hits ``max_epochs`` raises MaxEpochsExceeded
    carrying the partial trace; otherwise the flagged partial trace is
    returned.
    """
    if len(initial) < 1:
        raise ValueError("need at least one robot")
    eng = Engine(region, initial, algorithm, seed, eps)
    n = len(eng.robots)
    header = TraceHeader(
        region,
        n,
        seed,
        sched,
        _algo_name(algorithm),
        eps,
        tuple(r.pos for r in eng.robots),
        tuple(r.color for r in eng.robots),
    )
    rng = random.Random(seed)
    exceeded = False

    def over_budget() -> bool:
        return eng.counter.closed >= max_epochs

    if isinstance(sched, RandomAsync):
        heap = [(sched.max_gap * (1.0 - rng.random()), i) for i in range(n)]
        heapq.heapify(heap)
        while heap:
            t, rid = heapq.heappop(heap)
            d = sched.max_move_duration * (1.0 - rng.random())
            ev = eng.activate(rid, t, d)
            if ev.terminated:
                continue
            busy = ev.t_move_end - t
            heapq.heappush(heap, (ev.t_move_end + (sched.max_gap - busy) * (1.0 - rng.random()), rid))
            if over_budget():
                exceeded = True
                break
    elif isinstance(sched, Replay):
        for entry in sorted(sched.events, key=lambda e: (e.t_look, e.robot)):
            robot = eng.robots[entry.robot]
            if robot.terminated:
                continue
            if robot.moving is not None and robot.moving.t_move_end > entry.t_look:
                raise SchedulerError(f"replay activates robot {entry.robot} while it is still moving")
            span = entry.t_move_end - entry.t_move_begin
            eng.activate(entry.robot, entry.t_look, span if span > 0 else 1.0)
    else:
        t = 0.0
        while not eng.all_terminated:
            alive = [r.id for r in eng.robots if not r.terminated]
            if isinstance(sched, FSync):
                batches = [alive]
            elif isinstance(sched, SSync):
                chosen = [i for i in alive if rng.random() < sched.p]
                batches = [chosen or [rng.choice(alive)]]
            elif isinstance(sched, Sequential):
                rng.shuffle(alive)
                batches = [[i] for i in alive]
            else:
                raise TypeError(f"unknown scheduler {sched!r}")
            for batch in batches:
                # every robot of a batch looks before any of them acts
                looks = [(rid, *eng.look(rid, t)) for rid in batch]
                for rid, start, action in looks:
                    eng.apply(rid, t, start, action, 0.5)
                t += 1.0
                for r in eng.robots:
                    r.at(t)
            if over_budget():
                exceeded = True
                break
    trace = eng.trace(header, exceeded)
    if exceeded and strict:
        raise MaxEpochsExceeded(trace)
    return trace
