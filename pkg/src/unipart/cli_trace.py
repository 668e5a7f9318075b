"""Run configuration, trace files, SVG frames and sweeps.

A trace file is a JSON document with a versioned header. Every float is
written with 17 significant digits, so parsing a file and writing it again
reproduces it byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Iterable, Sequence

from .geometry import EPS, Point
from .model import (
    CIRCLE_COLORS,
    RECT_COLORS,
    SQUARE_COLORS,
    Circle,
    ConfigError,
    LightColor,
    Path,
    Rectangle,
    Region,
    Square,
    region_kind,
)
from .scheduler import (
    ActivationEvent,
    FSync,
    RandomAsync,
    Replay,
    ReplayEntry,
    SchedulerKind,
    Sequential,
    SSync,
    Trace,
    TraceFinal,
    TraceHeader,
    interpolate,
    run,
)

FORMAT_NAME = "unipart-trace"
FORMAT_VERSION = 1
EPS_ENV = "UNIPART_EPS"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_TIMEOUT = 2
EXIT_USAGE = 64
EXIT_DATA = 65


class TraceFormatError(ValueError):
    """The file is not a readable trace."""


# ------------------------------------------------------------------ parsing


def _numbers(spec: str, parts: Sequence[str], count: int) -> list[float]:
    if len(parts) != count:
        raise ConfigError(f"bad spec {spec!r}: expected {count} numeric field(s)")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"bad spec {spec!r}: not a number") from None
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"bad spec {spec!r}: values must be finite")
    return vals


def parse_region(spec: str) -> Region:
    """``rect:W:H``, ``square:S`` or ``circle:R``."""
    kind, *rest = spec.strip().split(":")
    kind = kind.lower()
    if kind in ("rect", "rectangle"):
        w, h = _numbers(spec, rest, 2)
        return Rectangle(w, h)
    if kind == "square":
        (s,) = _numbers(spec, rest, 1)
        return Square(s)
    if kind == "circle":
        (r,) = _numbers(spec, rest, 1)
        return Circle(r)
    raise ConfigError(f"unknown region kind {kind!r}")


def region_spec(region: Region) -> str:
    if isinstance(region, Rectangle):
        return f"rect:{region.w!r}:{region.h!r}"
    if isinstance(region, Square):
        return f"square:{region.side!r}"
    return f"circle:{region.radius!r}"


def parse_scheduler(spec: str) -> SchedulerKind:
    """``fsync``, ``ssync:P``, ``async:MAXGAP:MAXMOVE``, ``sequential`` or ``replay:FILE``."""
    kind, _, rest = spec.strip().partition(":")
    kind = kind.lower()
    try:
        if kind == "fsync" and not rest:
            return FSync()
        if kind == "sequential" and not rest:
            return Sequential()
        if kind == "ssync":
            (p,) = _numbers(spec, rest.split(":"), 1)
            return SSync(p)
        if kind == "async":
            gap, move = _numbers(spec, rest.split(":"), 2)
            return RandomAsync(gap, move)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if kind == "replay" and rest:
        tr = load_trace(rest)
        return Replay(tuple(ReplayEntry(e.robot, e.t_look, e.t_move_begin, e.t_move_end) for e in tr.events))
    raise ConfigError(f"unknown scheduler {spec!r}")


def parse_points(text: str) -> list[Point]:
    """``x,y;x,y;...``"""
    pts = []
    for chunk in text.replace(" ", "").split(";"):
        if not chunk:
            continue
        xy = chunk.split(",")
        x, y = _numbers(text, xy, 2)
        pts.append(Point(x, y))
    if not pts:
        raise ConfigError("no positions given")
    return pts


def env_eps(default: float = EPS) -> float:
    raw = os.environ.get(EPS_ENV)
    if raw is None or raw == "":
        return default
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"{EPS_ENV}={raw!r} is not a number") from None
    if not (v > 0 and math.isfinite(v)):
        raise ConfigError(f"{EPS_ENV} must be positive")
    return v


def algorithm_for(region: Region):
    from .algo_circle import circ_step
    from .algo_rectangle import rect_step
    from .algo_square import sq_step

    return {Rectangle: rect_step, Square: sq_step, Circle: circ_step}[type(region)]


def color_budget(region: Region) -> frozenset[LightColor]:
    return {Rectangle: RECT_COLORS, Square: SQUARE_COLORS, Circle: CIRCLE_COLORS}[type(region)]


def default_epoch_bound(region: Region, n: int) -> int:
    return 50 * n * n if isinstance(region, Circle) else 50 * n


# ------------------------------------------------------------ configurations


def random_initial(region: Region, n: int, seed: int, eps: float = EPS) -> list[Point]:
    """n distinct points drawn uniformly from the closed region."""
    rng = random.Random(f"init:{seed}:{n}")
    pts: list[Point] = []
    while len(pts) < n:
        if isinstance(region, Circle):
            r = region.radius
            p = Point(rng.uniform(-r, r), rng.uniform(-r, r))
            if math.hypot(*p) > r:
                continue
        else:
            p = Point(rng.uniform(0, region.width), rng.uniform(0, region.height))
        if all(math.dist(p, q) > eps for q in pts):
            pts.append(p)
    return pts


@dataclass
class RunConfig:
    region: Region
    n: int
    scheduler: SchedulerKind = field(default_factory=lambda: RandomAsync(2.0, 1.0))
    seed: int = 0
    max_epochs: int = 10_000
    eps: float = EPS
    positions: list[Point] | None = None  # None means random
    trace_path: str | None = None
    svg_dir: str | None = None
    svg_stride: int = 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if self.max_epochs < 1:
            raise ConfigError("max_epochs must be at least 1")
        if self.svg_stride < 1:
            raise ConfigError("svg stride must be at least 1")
        if self.positions is not None:
            if len(self.positions) != self.n:
                raise ConfigError(f"{len(self.positions)} positions given for n={self.n}")
            for i, p in enumerate(self.positions):
                if not self.region.contains(p, self.eps):
                    raise ConfigError(f"position {i} {tuple(p)} lies outside the region")
                if any(math.dist(p, q) <= self.eps for q in self.positions[:i]):
                    raise ConfigError(f"position {i} {tuple(p)} is repeated")

    def initial(self) -> list[Point]:
        if self.positions is not None:
            return list(self.positions)
        return random_initial(self.region, self.n, self.seed, self.eps)


def execute(cfg: RunConfig) -> Trace:
    tr = run(
        cfg.region,
        cfg.initial(),
        algorithm_for(cfg.region),
        cfg.scheduler,
        seed=cfg.seed,
        max_epochs=cfg.max_epochs,
        eps=cfg.eps,
        strict=False,
    )
    if cfg.trace_path:
        save_trace(tr, cfg.trace_path)
    if cfg.svg_dir:
        render_frames(tr, cfg.svg_dir, cfg.svg_stride)
    return tr


# ------------------------------------------------------------- trace format


def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise TraceFormatError(f"non-finite value {x}")
    return format(x, ".17g")


def _enc(v) -> str:
    """Compact JSON with fixed float formatting."""
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return _num(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_enc(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_enc(x) for x in v) + "]"
    raise TypeError(f"cannot encode {type(v).__name__}")


def _pt(p) -> list[float]:
    return [float(p[0]), float(p[1])]


def _region_dict(region: Region) -> dict:
    kind = region_kind(region)
    if isinstance(region, Rectangle):
        return {"kind": kind, "width": float(region.w), "height": float(region.h)}
    if isinstance(region, Square):
        return {"kind": kind, "side": float(region.side)}
    return {"kind": kind, "radius": float(region.radius)}


def _sched_dict(s: SchedulerKind) -> dict:
    if isinstance(s, FSync):
        return {"kind": "fsync"}
    if isinstance(s, SSync):
        return {"kind": "ssync", "p": float(s.p)}
    if isinstance(s, RandomAsync):
        return {"kind": "async", "max_gap": float(s.max_gap), "max_move_duration": float(s.max_move_duration)}
    if isinstance(s, Sequential):
        return {"kind": "sequential"}
    entries = [[e.robot, float(e.t_look), float(e.t_move_begin), float(e.t_move_end)] for e in s.events]
    return {"kind": "replay", "entries": entries}


def _event_dict(e: ActivationEvent) -> dict:
    return {
        "robot": e.robot,
        "t_look": float(e.t_look),
        "t_move_begin": float(e.t_move_begin),
        "t_move_end": float(e.t_move_end),
        "color_before": e.color_before.value,
        "color_after": e.color_after.value,
        "start": _pt(e.start),
        "end": _pt(e.end),
        "path": {"kind": e.path.kind, "direction": e.path.direction},
        "terminated": bool(e.terminated),
    }


def dumps_trace(tr: Trace) -> str:
    h, f = tr.header, tr.final
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "region": _region_dict(h.region),
        "n": h.n,
        "seed": h.seed,
        "scheduler": _sched_dict(h.scheduler),
        "algorithm": h.algorithm,
        "eps": float(h.eps),
        "initial": [_pt(p) for p in h.initial],
        "initial_colors": [c.value for c in h.initial_colors],
    }
    final = {
        "positions": [_pt(p) for p in f.positions],
        "colors": [c.value for c in f.colors],
        "terminated": bool(f.terminated),
        "epochs": int(f.epochs),
        "max_epochs_exceeded": bool(f.max_epochs_exceeded),
    }
    out = io.StringIO()
    out.write("{\n")
    out.write(f'  "header": {_enc(header)},\n')
    if tr.events:
        out.write('  "events": [\n')
        out.write(",\n".join("    " + _enc(_event_dict(e)) for e in tr.events))
        out.write("\n  ],\n")
    else:
        out.write('  "events": [],\n')
    out.write(f'  "final": {_enc(final)}\n')
    out.write("}\n")
    return out.getvalue()


def _get(d: dict, key: str, kind=None):
    if not isinstance(d, dict) or key not in d:
        raise TraceFormatError(f"missing field {key!r}")
    v = d[key]
    if kind is float:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise TraceFormatError(f"field {key!r} is not a number")
        return float(v)
    if kind is not None and not isinstance(v, kind):
        raise TraceFormatError(f"field {key!r} has the wrong type")
    return v


def _point_from(v) -> Point:
    if not isinstance(v, list) or len(v) != 2 or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        raise TraceFormatError(f"bad point {v!r}")
    return Point(float(v[0]), float(v[1]))


def _color_from(v) -> LightColor:
    try:
        return LightColor(v)
    except ValueError:
        raise TraceFormatError(f"unknown color {v!r}") from None


def _region_from(d: dict) -> Region:
    kind = _get(d, "kind", str)
    try:
        if kind == "rect":
            return Rectangle(_get(d, "width", float), _get(d, "height", float))
        if kind == "square":
            return Square(_get(d, "side", float))
        if kind == "circle":
            return Circle(_get(d, "radius", float))
    except ConfigError as exc:
        raise TraceFormatError(str(exc)) from None
    raise TraceFormatError(f"unknown region kind {kind!r}")


def _sched_from(d: dict) -> SchedulerKind:
    kind = _get(d, "kind", str)
    try:
        if kind == "fsync":
            return FSync()
        if kind == "sequential":
            return Sequential()
        if kind == "ssync":
            return SSync(_get(d, "p", float))
        if kind == "async":
            return RandomAsync(_get(d, "max_gap", float), _get(d, "max_move_duration", float))
    except ValueError as exc:
        raise TraceFormatError(str(exc)) from None
    if kind == "replay":
        entries = []
        for row in _get(d, "entries", list):
            if not isinstance(row, list) or len(row) != 4:
                raise TraceFormatError("bad replay entry")
            entries.append(ReplayEntry(int(row[0]), float(row[1]), float(row[2]), float(row[3])))
        return Replay(tuple(entries))
    raise TraceFormatError(f"unknown scheduler kind {kind!r}")


def _event_from(d: dict) -> ActivationEvent:
    path = _get(d, "path", dict)
    pkind = _get(path, "kind", str)
    direction = path.get("direction")
    if pkind not in ("segment", "arc") or direction not in (None, "cw", "ccw"):
        raise TraceFormatError(f"bad path {path!r}")
    return ActivationEvent(
        _get(d, "robot", int),
        _get(d, "t_look", float),
        _get(d, "t_move_begin", float),
        _get(d, "t_move_end", float),
        _color_from(_get(d, "color_before")),
        _color_from(_get(d, "color_after")),
        _point_from(_get(d, "start")),
        _point_from(_get(d, "end")),
        Path(pkind, direction),
        _get(d, "terminated", bool),
    )


def loads_trace(text: str) -> Trace:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"not valid JSON: {exc}") from None
    head = _get(doc, "header", dict)
    if head.get("format") != FORMAT_NAME:
        raise TraceFormatError("not a trace file")
    if head.get("version") != FORMAT_VERSION:
        raise TraceFormatError(f"unsupported trace version {head.get('version')!r}")
    n = _get(head, "n", int)
    header = TraceHeader(
        _region_from(_get(head, "region", dict)),
        n,
        _get(head, "seed", int),
        _sched_from(_get(head, "scheduler", dict)),
        _get(head, "algorithm", str),
        _get(head, "eps", float),
        tuple(_point_from(p) for p in _get(head, "initial", list)),
        tuple(_color_from(c) for c in _get(head, "initial_colors", list)),
    )
    events = tuple(_event_from(e) for e in _get(doc, "events", list))
    fin = _get(doc, "final", dict)
    final = TraceFinal(
        tuple(_point_from(p) for p in _get(fin, "positions", list)),
        tuple(_color_from(c) for c in _get(fin, "colors", list)),
        _get(fin, "terminated", bool),
        _get(fin, "epochs", int),
        _get(fin, "max_epochs_exceeded", bool),
    )
    sizes = {n, len(header.initial), len(header.initial_colors), len(final.positions), len(final.colors)}
    if len(sizes) != 1:
        raise TraceFormatError("robot counts disagree")
    if any(not 0 <= e.robot < n for e in events):
        raise TraceFormatError("event refers to an unknown robot")
    return Trace(header, events, final)


def save_trace(tr: Trace, path: str | os.PathLike) -> None:
    FsPath(path).write_text(dumps_trace(tr), encoding="utf-8")


def load_trace(path: str | os.PathLike) -> Trace:
    try:
        text = FsPath(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise TraceFormatError(f"cannot read {path}: {exc}") from None
    return loads_trace(text)


# ------------------------------------------------------------------ checks


def verify_trace(tr: Trace) -> dict:
    """All audits on a finished trace, as a JSON-ready report with an ``ok`` flag."""
    from .verify import build_partition, check_no_collision, color_usage, infer_partition_type

    region = tr.header.region
    eps = tr.header.eps
    col = check_no_collision(tr, eps)
    used = color_usage(tr)
    budget = color_budget(region)
    report: dict = {
        "n": tr.header.n,
        "algorithm": tr.header.algorithm,
        "terminated": tr.final.terminated,
        "max_epochs_exceeded": tr.final.max_epochs_exceeded,
        "epochs": tr.final.epochs,
        "collision": {
            "collided": col.collided,
            "min_approach": col.min_approach if math.isfinite(col.min_approach) else None,
            "pair": list(col.pair) if col.pair else None,
            "interval": list(col.interval) if col.interval else None,
        },
        "colors": {
            "used": sorted(c.value for c in used),
            "within_budget": used <= budget,
            "budget_size": len(budget),
        },
    }
    part: dict = {"type": None, "uniform": False, "max_rel_area_error": None, "error": None}
    try:
        ty = infer_partition_type(tr.final, region)
        rep = build_partition(tr.final, region, ty)
        part.update(type=rep.type, uniform=rep.uniform, max_rel_area_error=rep.max_rel_area_error)
    except ValueError as exc:
        part["error"] = f"{type(exc).__name__}: {exc}"
    report["partition"] = part
    report["uniform"] = part["uniform"]
    report["ok"] = bool(
        tr.final.terminated and not col.collided and used <= budget and part["uniform"]
    )
    return report


# ---------------------------------------------------------------- rendering

VIEW = 800.0
MARGIN = 40.0
PALETTE = {
    LightColor.OFF: "#8c8c8c",
    LightColor.MONITOR: "#f28e2b",
    LightColor.HEAD: "#1f4e9c",
    LightColor.TAIL: "#4e79a7",
    LightColor.MID: "#9ecae9",
    LightColor.MOVE_H: "#6a3d9a",
    LightColor.HALF: "#9467bd",
    LightColor.FULL: "#c5b0d5",
    LightColor.FINISH: "#2ca02c",
    LightColor.FINISH1: "#59a14f",
    LightColor.FINISH2: "#98df8a",
}


class _Canvas:
    """Maps region coordinates (y up) into an 800-unit viewBox (y down)."""

    def __init__(self, region: Region):
        if isinstance(region, Circle):
            r = region.radius
            self.x0, self.y0, self.w, self.h = -r, -r, 2 * r, 2 * r
        else:
            self.x0, self.y0, self.w, self.h = 0.0, 0.0, region.width, region.height
        self.scale = (VIEW - 2 * MARGIN) / max(self.w, self.h)

    def xy(self, p) -> tuple[float, float]:
        x = MARGIN + (p[0] - self.x0) * self.scale
        y = VIEW - MARGIN - (p[1] - self.y0) * self.scale
        return round(x, 3), round(y, 3)


def _region_svg(region: Region, cv: _Canvas) -> str:
    if isinstance(region, Circle):
        cx, cy = cv.xy((0.0, 0.0))
        return f'<circle cx="{cx}" cy="{cy}" r="{round(region.radius * cv.scale, 3)}" fill="none" stroke="black"/>'
    x, y = cv.xy((0.0, region.height))
    return (
        f'<rect x="{x}" y="{y}" width="{round(region.width * cv.scale, 3)}" '
        f'height="{round(region.height * cv.scale, 3)}" fill="none" stroke="black"/>'
    )


def frame_svg(region: Region, positions: Sequence, colors: Sequence[LightColor], arrows=(), title: str = "") -> str:
    cv = _Canvas(region)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {int(VIEW)} {int(VIEW)}" width="{int(VIEW)}" height="{int(VIEW)}">',
        "<defs><marker id=\"head\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" orient=\"auto\">"
        '<path d="M0,0 L8,4 L0,8 z" fill="black"/></marker></defs>',
        '<rect width="100%" height="100%" fill="white"/>',
        _region_svg(region, cv),
    ]
    for a, b in arrows:
        (x1, y1), (x2, y2) = cv.xy(a), cv.xy(b)
        parts.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="black" stroke-width="1" marker-end="url(#head)"/>')
    for i, (p, c) in enumerate(zip(positions, colors)):
        x, y = cv.xy(p)
        parts.append(f'<circle cx="{x}" cy="{y}" r="6" fill="{PALETTE[c]}" stroke="black" stroke-width="0.5"><title>{i} {c.value}</title></circle>')
    shown = sorted(set(colors), key=lambda c: list(LightColor).index(c))
    for k, c in enumerate(shown):
        y = 14 + 14 * k
        parts.append(f'<circle cx="10" cy="{y - 4}" r="5" fill="{PALETTE[c]}"/>')
        parts.append(f'<text x="20" y="{y}" font-size="11" font-family="sans-serif">{c.value}</text>')
    if title:
        parts.append(f'<text x="{int(VIEW) - 10}" y="14" font-size="11" font-family="sans-serif" text-anchor="end">{title}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def iter_frames(tr: Trace, stride: int = 1):
    """Yield (index, positions, colors, arrows) at the Look instant of every stride-th event."""
    n = tr.header.n
    if not tr.events:
        yield 0, list(tr.header.initial), list(tr.header.initial_colors), []
        return
    last: list[ActivationEvent | None] = [None] * n
    colors = list(tr.header.initial_colors)
    for k, ev in enumerate(tr.events):
        last[ev.robot] = ev
        colors[ev.robot] = ev.color_after
        if k % stride:
            continue
        t = ev.t_look
        pos, arrows = [], []
        for i in range(n):
            e = last[i]
            pos.append(tr.header.initial[i] if e is None else interpolate(e, t))
            if e is not None and e.moves and e.t_move_begin <= t < e.t_move_end:
                arrows.append((e.start, e.end))
        yield k, pos, list(colors), arrows


def render_frames(tr: Trace, out_dir: str | os.PathLike, stride: int = 1) -> list[FsPath]:
    out = FsPath(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for k, pos, cols, arrows in iter_frames(tr, stride):
        f = out / f"frame_{k:06d}.svg"
        f.write_text(frame_svg(tr.header.region, pos, cols, arrows, f"event {k}"), encoding="utf-8")
        files.append(f)
    return files


# ------------------------------------------------------------------- sweeps

SWEEP_COLUMNS = ("N", "seed", "epochs", "terminated", "type")


@dataclass(frozen=True)
class SweepJob:
    region: Region
    n: int
    seed: int
    scheduler: SchedulerKind
    max_epochs: int
    eps: float = EPS


def _sweep_one(job: SweepJob) -> dict:
    from .verify import infer_partition_type

    cfg = RunConfig(job.region, job.n, job.scheduler, job.seed, job.max_epochs, job.eps)
    tr = execute(cfg)
    try:
        ty = infer_partition_type(tr.final, job.region) if tr.final.terminated else ""
    except ValueError:
        ty = "unrecognized"
    return {
        "N": job.n,
        "seed": job.seed,
        "epochs": tr.final.epochs,
        "terminated": str(bool(tr.final.terminated)).lower(),
        "type": ty,
    }


def sweep(
    region: Region,
    ns: Iterable[int],
    seeds: Iterable[int],
    scheduler: SchedulerKind,
    max_epochs: int | None = None,
    eps: float = EPS,
    jobs: int = 1,
) -> list[dict]:
    seeds = list(seeds)
    work = [
        SweepJob(region, n, s, scheduler, max_epochs or default_epoch_bound(region, n) + 1, eps)
        for n in ns
        for s in seeds
    ]
    if jobs <= 1:
        return [_sweep_one(j) for j in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_one, work, chunksize=4))


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def parse_int_range(text: str) -> list[int]:
    """``5``, ``1..8`` (inclusive) or ``1,3,7``."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            a, b = int(lo), int(hi)
            if b < a:
                raise ConfigError(f"empty range {text!r}")
            return list(range(a, b + 1))
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise ConfigError(f"bad integer range {text!r}") from None
