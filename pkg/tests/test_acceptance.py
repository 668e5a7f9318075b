"""End-to-end acceptance criteria. Each test prints one PASS/FAIL line."""

import re
import subprocess
import sys
from pathlib import Path

import pytest

from unipart.algo_rectangle import rect_step
from unipart.cli_trace import color_budget, default_epoch_bound, random_initial
from unipart.experiments import STANDARD_ASYNC, per_n_max, sweep_audit
from unipart.model import Circle, Rectangle, Square
from unipart.scheduler import Sequential, run
from unipart.verify import fit_linear_envelope, infer_partition_type

from .oracles import strip_layout

pytestmark = pytest.mark.slow

NS = range(1, 13)
SEEDS = range(100)
RECT, SQUARE, CIRCLE = Rectangle(4, 2), Square(4), Circle(1)
TYPES = {"rect": {"I", "II"}, "square": {"I", "II", "III", "IV"}, "circle": {"V"}}
REGIONS = {"rect": RECT, "square": SQUARE, "circle": CIRCLE}


def report(capsys, name: str, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def _failures(rows):
    return [f"N={r.n} seed={r.seed}: {'; '.join(r.problems)}" for r in rows if not r.ok]


@pytest.fixture(scope="module")
def sweeps():
    return {k: sweep_audit(REGIONS[k], NS, SEEDS, TYPES[k], STANDARD_ASYNC) for k in REGIONS}


@pytest.fixture(scope="module")
def collinear():
    return {k: sweep_audit(REGIONS[k], range(3, 11), range(25), TYPES[k], STANDARD_ASYNC, "collinear") for k in REGIONS}


def _end_to_end(capsys, sweeps, key, label):
    rows = sweeps[key]
    bad = _failures(rows)
    types = sorted({r.ptype for r in rows if r.ptype})
    report(capsys, label, not bad, f"{len(rows)} runs, {len(bad)} failing, types seen {types}")
    assert not bad, bad[:5]


def test_c1_rectangle_end_to_end(sweeps, capsys):
    _end_to_end(capsys, sweeps, "rect", "C1 rectangle 4x2, N=1..12 x 100 seeds")


def test_c2_square_end_to_end(sweeps, capsys):
    _end_to_end(capsys, sweeps, "square", "C2 square side 4, N=1..12 x 100 seeds")


def test_c3_circle_end_to_end(sweeps, capsys):
    rows = sweeps["circle"]
    assert all(r.ring_ok for r in rows if r.ok)
    _end_to_end(capsys, sweeps, "circle", "C3 unit circle, N=1..12 x 100 seeds")


def test_c4_epoch_bounds(sweeps, capsys):
    over = [
        (k, r.n, r.seed, r.epochs)
        for k, rows in sweeps.items()
        for r in rows
        if r.epochs > default_epoch_bound(REGIONS[k], r.n)
    ]
    fits = {}
    for k in ("rect", "square"):
        peaks = per_n_max(sweeps[k])
        a, b = fit_linear_envelope(peaks)
        assert all(a * n + b - e >= -1e-9 for n, e in peaks.items())
        fits[k] = f"{k} max/N {peaks} <= {a:.2f}N+{b:.2f}"
    circ = per_n_max(sweeps["circle"])
    detail = f"{len(over)} runs over bound; " + "; ".join(fits.values()) + f"; circle max/N {circ}"
    report(capsys, "C4 epochs <= 50N (50N^2 circle)", not over, detail)
    assert not over, over[:5]


def test_c5_color_budgets(sweeps, collinear, capsys):
    sizes = {k: len(color_budget(REGIONS[k])) for k in REGIONS}
    outside = [
        (k, r.n, r.seed, sorted(c.value for c in r.colors - color_budget(REGIONS[k])))
        for src in (sweeps, collinear)
        for k, rows in src.items()
        for r in rows
        if not r.within_budget
    ]
    used = {k: len(frozenset().union(*(r.colors for r in sweeps[k]))) for k in REGIONS}
    ok = not outside and sizes == {"rect": 2, "square": 5, "circle": 8}
    report(capsys, "C5 color budgets 2/5/8", ok, f"budgets {sizes}, distinct colors observed {used}")
    assert ok, outside[:5]


def test_c6_collinear_start(collinear, capsys):
    bad = {k: _failures(rows) for k, rows in collinear.items()}
    n_bad = sum(map(len, bad.values()))
    runs = sum(map(len, collinear.values()))
    report(capsys, "C6 collinear start N=3..10 x 25 seeds, all regions", not n_bad, f"{runs} runs, {n_bad} failing")
    assert not n_bad, {k: v[:3] for k, v in bad.items() if v}


def test_c7_sequential_matches_closed_form(capsys):
    mismatches, worst = [], 0.0
    runs = 0
    for n in range(1, 6):
        for seed in SEEDS:
            tr = run(RECT, random_initial(RECT, n, seed), rect_step, Sequential(), seed=seed,
                     max_epochs=default_epoch_bound(RECT, n) + 1)
            runs += 1
            ptype = infer_partition_type(tr.final, RECT)
            want = strip_layout(n, RECT.width, RECT.height, ptype)
            got = sorted(tuple(p) for p in tr.final.positions)
            err = max(max(abs(g[0] - w[0]), abs(g[1] - w[1])) for g, w in zip(got, want))
            worst = max(worst, err)
            if err > 1e-9:
                mismatches.append((n, seed, ptype, err))
    report(capsys, "C7 sequential rectangle N<=5 vs strip layout", not mismatches,
           f"{runs} runs, worst coordinate error {worst:.2e}")
    assert not mismatches, mismatches[:5]


PROPERTY_SUITES = {
    "convex hull vs brute force": "tests/test_geometry.py::test_hull_matches_brute_force",
    "arc round trip": "tests/test_geometry.py::test_point_on_arc_round_trip",
    "cluster persistence and growth": "tests/test_algo_circle.py::test_clusters_persist_and_grow",
    "apex confinement": "tests/test_algo_square.py::test_apex_confinement",
    "snapshot visibility vs brute force": "tests/test_model.py::test_snapshot_matches_brute_force_visibility",
    "scheduler determinism": "tests/test_scheduler.py::test_determinism_fairness_and_look_consistency",
    "trace round trip": "tests/test_cli_trace.py::test_round_trip_property",
}


def test_c8_property_suites(capsys):
    root = Path(__file__).resolve().parent.parent
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", "--hypothesis-show-statistics",
         *PROPERTY_SUITES.values()],
        cwd=root, capture_output=True, text=True,
    )
    counts = {}
    for block in re.split(r"\n(?=tests/\S+::\S+:\n)", proc.stdout):
        head = block.split(":\n", 1)[0].strip()
        counts[head] = sum(int(m) for m in re.findall(r"(\d+) passing examples", block))
    short = {name: counts.get(node, 0) for name, node in PROPERTY_SUITES.items()}
    ok = proc.returncode == 0 and all(v >= 200 for v in short.values())
    report(capsys, "C8 property suites (>=200 cases each)", ok, ", ".join(f"{k}={v}" for k, v in short.items()))
    assert ok, proc.stdout[-3000:]
