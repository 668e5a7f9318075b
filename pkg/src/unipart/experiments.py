"""Audited end-to-end runs shared by the acceptance suite and the scripts."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cli_trace import algorithm_for, color_budget, default_epoch_bound, random_initial
from .geometry import EPS, Point
from .model import Circle, Region
from .scheduler import RandomAsync, SchedulerKind, Trace, run
from .verify import build_partition, check_no_collision, color_usage, infer_partition_type

STANDARD_ASYNC = RandomAsync(2.0, 1.0)


@dataclass
class RunSummary:
    region: Region
    n: int
    seed: int
    epochs: int
    terminated: bool
    ptype: str | None
    uniform: bool
    max_rel_area_error: float | None
    min_approach: float
    colors: frozenset
    within_budget: bool
    one_per_cell: bool
    ring_ok: bool | None = None  # circle only: radius and angular gaps
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


def _ring_check(tr: Trace, tol_r: float = 1e-9, tol_gap: float = 1e-6) -> list[str]:
    rad = tr.header.region.radius
    pts = tr.final.positions
    out = []
    if any(abs(math.hypot(*p) - rad / 2) > tol_r for p in pts):
        out.append("final radius off rad/2")
    if len(pts) > 1:
        angs = sorted(math.atan2(p[1], p[0]) for p in pts)
        gaps = [b - a for a, b in zip(angs, angs[1:])] + [angs[0] + 2 * math.pi - angs[-1]]
        if any(abs(g - 2 * math.pi / len(pts)) > tol_gap for g in gaps):
            out.append("angular gaps not uniform")
    return out


def audit(tr: Trace, allowed_types: Iterable[str] | None = None) -> RunSummary:
    region = tr.header.region
    h, f = tr.header, tr.final
    problems: list[str] = []
    if not f.terminated:
        problems.append("did not terminate")
    col = check_no_collision(tr, h.eps)
    if col.min_approach <= h.eps:
        problems.append(f"collision {col.pair} at {col.interval}")
    used = frozenset(color_usage(tr))
    budget_ok = used <= color_budget(region)
    if not budget_ok:
        problems.append(f"colors outside budget: {sorted(c.value for c in used - color_budget(region))}")
    ptype, uniform, err, one_per_cell = None, False, None, False
    if f.terminated:
        try:
            ptype = infer_partition_type(f, region)
            rep = build_partition(f, region, ptype)
            uniform, err = rep.uniform, rep.max_rel_area_error
            one_per_cell = sorted(rep.assignment.values()) == list(range(h.n)) and len(rep.assignment) == h.n
        except ValueError as exc:
            problems.append(f"partition: {type(exc).__name__}: {exc}")
        if ptype is not None and not uniform:
            problems.append(f"type {ptype} not uniform (err {err})")
        if ptype is not None and not one_per_cell:
            problems.append("cell assignment is not one robot per cell")
        if allowed_types is not None and ptype is not None and ptype not in set(allowed_types):
            problems.append(f"unexpected type {ptype}")
    ring_ok = None
    if isinstance(region, Circle) and f.terminated:
        bad = _ring_check(tr)
        ring_ok = not bad
        problems += bad
    return RunSummary(
        region, h.n, h.seed, f.epochs, f.terminated, ptype, uniform, err, col.min_approach,
        used, budget_ok, one_per_cell, ring_ok, problems,
    )


def audited_run(
    region: Region,
    initial: Sequence[Point],
    seed: int,
    sched: SchedulerKind = STANDARD_ASYNC,
    max_epochs: int | None = None,
    allowed_types: Iterable[str] | None = None,
    eps: float = EPS,
) -> RunSummary:
    n = len(initial)
    budget = max_epochs if max_epochs is not None else default_epoch_bound(region, n) + 1
    tr = run(region, initial, algorithm_for(region), sched, seed=seed, max_epochs=budget, eps=eps, strict=False)
    return audit(tr, allowed_types)


def collinear_initial(region: Region, n: int, seed: int, margin: float = 1e-3) -> list[Point]:
    """n distinct points on one random segment strictly inside the region."""
    rng = random.Random(f"line:{seed}:{n}")

    def sample() -> Point:
        if isinstance(region, Circle):
            while True:
                r = region.radius
                p = Point(rng.uniform(-r, r), rng.uniform(-r, r))
                if math.hypot(*p) < r - margin:
                    return p
        return Point(
            rng.uniform(margin, region.width - margin), rng.uniform(margin, region.height - margin)
        )

    while True:
        a, b = sample(), sample()
        if math.dist(a, b) > 0.25 * (2 * region.radius if isinstance(region, Circle) else min(region.width, region.height)):
            break
    ts = sorted(rng.random() for _ in range(n))
    pts = [Point(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])) for t in ts]
    if any(math.dist(p, q) <= 1e-6 for p, q in zip(pts, pts[1:])):
        return collinear_initial(region, n, seed + 7919, margin)
    return pts


def sweep_audit(
    region: Region,
    ns: Iterable[int],
    seeds: Iterable[int],
    allowed_types: Iterable[str] | None = None,
    sched: SchedulerKind = STANDARD_ASYNC,
    init: str = "random",
) -> list[RunSummary]:
    out = []
    seeds = list(seeds)
    for n in ns:
        for s in seeds:
            pts = random_initial(region, n, s) if init == "random" else collinear_initial(region, n, s)
            out.append(audited_run(region, pts, s, sched, allowed_types=allowed_types))
    return out


def per_n_max(rows: Iterable[RunSummary]) -> dict[int, int]:
    best: dict[int, int] = {}
    for r in rows:
        best[r.n] = max(best.get(r.n, 0), r.epochs)
    return dict(sorted(best.items()))
