"""``unipart`` command line: run, verify, render, sweep."""

from __future__ import annotations

import json
import sys

import click

from . import cli_trace as ct
from .model import ConfigError


def _config_error(msg: str) -> click.UsageError:
    return click.UsageError(msg)


@click.group()
def main() -> None:
    """Simulate luminous robots partitioning a region into equal cells."""


@main.command("run")
@click.option("--region", "region_text", required=True, help="rect:W:H | square:S | circle:R")
@click.option("--n", "n", type=int, help="number of robots (defaults to the number of --points)")
@click.option("--points", default=None, help="explicit start positions 'x,y;x,y;...'")
@click.option("--scheduler", "sched_text", default="async:2.0:1.0", show_default=True,
              help="fsync | ssync:P | async:MAXGAP:MAXMOVE | sequential | replay:FILE")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-epochs", type=int, default=None, help="default: 50N (50N^2 on a circle) plus one")
@click.option("--eps", type=float, default=None, help=f"tolerance; falls back to ${ct.EPS_ENV}, then 1e-9")
@click.option("--out", "out", type=click.Path(dir_okay=False), default=None, help="trace file to write")
@click.option("--svg-dir", type=click.Path(file_okay=False), default=None)
@click.option("--svg-stride", type=int, default=1, show_default=True)
def run_cmd(region_text, n, points, sched_text, seed, max_epochs, eps, out, svg_dir, svg_stride):
    """Run one simulation. Exit 0 when every robot terminates, 2 on epoch budget exhaustion."""
    try:
        region = ct.parse_region(region_text)
        pts = ct.parse_points(points) if points else None
        if n is None:
            if pts is None:
                raise ConfigError("give --n or --points")
            n = len(pts)
        sched = ct.parse_scheduler(sched_text)
        cfg = ct.RunConfig(
            region,
            n,
            sched,
            seed,
            max_epochs if max_epochs is not None else (ct.default_epoch_bound(region, max(n, 1)) + 1),
            eps if eps is not None else ct.env_eps(),
            pts,
            out,
            svg_dir,
            svg_stride,
        )
    except (ConfigError, ct.TraceFormatError) as exc:
        raise _config_error(str(exc)) from None
    tr = ct.execute(cfg)
    f = tr.final
    click.echo(
        json.dumps(
            {"terminated": f.terminated, "epochs": f.epochs, "events": len(tr.events), "trace": out}
        )
    )
    sys.exit(ct.EXIT_OK if f.terminated else ct.EXIT_TIMEOUT)


@main.command("verify")
@click.argument("trace_path", type=click.Path(dir_okay=False))
def verify_cmd(trace_path):
    """Audit a trace: termination, collisions, colors, partition. Exit 0 iff all pass."""
    try:
        tr = ct.load_trace(trace_path)
    except ct.TraceFormatError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(ct.EXIT_DATA)
    report = ct.verify_trace(tr)
    click.echo(json.dumps(report, indent=2))
    sys.exit(ct.EXIT_OK if report["ok"] else ct.EXIT_FAILED)


@main.command("render")
@click.argument("trace_path", type=click.Path(dir_okay=False))
@click.option("--svg-dir", type=click.Path(file_okay=False), required=True)
@click.option("--stride", type=int, default=1, show_default=True)
def render_cmd(trace_path, svg_dir, stride):
    """Write one SVG frame per stride-th event."""
    if stride < 1:
        raise _config_error("stride must be at least 1")
    try:
        tr = ct.load_trace(trace_path)
    except ct.TraceFormatError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(ct.EXIT_DATA)
    files = ct.render_frames(tr, svg_dir, stride)
    click.echo(f"{len(files)} frame(s) written to {svg_dir}")


@main.command("sweep")
@click.option("--region", "region_text", required=True)
@click.option("--n", "n_text", required=True, help="e.g. 1..8 or 3,5,7")
@click.option("--seeds", "seeds_text", default="10", show_default=True,
              help="a count (seeds 0..K-1) or an explicit range like 5..9")
@click.option("--scheduler", "sched_text", default="async:2.0:1.0", show_default=True)
@click.option("--max-epochs", type=int, default=None)
@click.option("--eps", type=float, default=None)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV file (default: stdout)")
def sweep_cmd(region_text, n_text, seeds_text, sched_text, max_epochs, eps, jobs, out):
    """Run many seeds per N and write one CSV row per run."""
    try:
        region = ct.parse_region(region_text)
        ns = ct.parse_int_range(n_text)
        if any(n < 1 for n in ns):
            raise ConfigError("N must be at least 1")
        if ".." in seeds_text or "," in seeds_text:
            seeds = ct.parse_int_range(seeds_text)
        else:
            seeds = list(range(ct.parse_int_range(seeds_text)[0]))
        sched = ct.parse_scheduler(sched_text)
        eps_v = eps if eps is not None else ct.env_eps()
    except (ConfigError, ct.TraceFormatError, IndexError) as exc:
        raise _config_error(str(exc) or "bad arguments") from None
    rows = ct.sweep(region, ns, seeds, sched, max_epochs, eps_v, jobs)
    text = ct.rows_to_csv(rows)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def entry(argv=None) -> int:
    """Console-script entry point mapping usage errors to exit status 64."""
    try:
        main.main(args=argv, prog_name="unipart", standalone_mode=False)
    except click.exceptions.UsageError as exc:
        exc.show()
        return ct.EXIT_USAGE
    except click.exceptions.Abort:
        return ct.EXIT_FAILED
    except SystemExit as exc:
        return int(exc.code or 0)
    return ct.EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(entry())
