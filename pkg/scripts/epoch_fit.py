"""Per-N worst-case epochs from a sweep CSV, a linear envelope fit and an SVG growth plot.

    unipart sweep --region rect:4:2 --n 1..12 --seeds 100 --out rect.csv
    python scripts/epoch_fit.py rect.csv --svg rect_epochs.svg
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

from unipart.verify import fit_linear_envelope


def load_peaks(path: Path) -> dict[int, int]:
    peaks: dict[int, int] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            n, e = int(row["N"]), int(row["epochs"])
            peaks[n] = max(peaks.get(n, 0), e)
    return dict(sorted(peaks.items()))


def growth_svg(peaks: dict[int, int], a: float, b: float, width: int = 640, height: int = 400) -> str:
    pad = 50
    nmax = max(peaks)
    emax = max(max(peaks.values()), a * nmax + b) or 1
    sx = lambda n: pad + (width - 2 * pad) * n / nmax
    sy = lambda e: height - pad - (height - 2 * pad) * e / emax
    dots = "".join(f'<circle cx="{sx(n):.1f}" cy="{sy(e):.1f}" r="4" fill="#1f77b4"/>' for n, e in peaks.items())
    line = f'<line x1="{sx(0):.1f}" y1="{sy(b):.1f}" x2="{sx(nmax):.1f}" y2="{sy(a * nmax + b):.1f}" stroke="#d62728"/>'
    axes = (
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>'
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>'
        f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle">N</text>'
        f'<text x="14" y="{height / 2}" transform="rotate(-90 14 {height / 2})" text-anchor="middle">max epochs</text>'
        f'<text x="{width - pad}" y="{pad - 10}" text-anchor="end">{a:.2f} N + {b:.2f}</text>'
    )
    return f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">{axes}{line}{dots}</svg>\n'


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv", type=Path)
    ap.add_argument("--svg", type=Path, default=None)
    args = ap.parse_args()
    peaks = load_peaks(args.csv)
    a, b = fit_linear_envelope(peaks)
    for n, e in peaks.items():
        print(f"N={n:3d} max_epochs={e:5d} envelope={a * n + b:8.2f}")
    print(f"envelope: epochs <= {a:.3f} * N + {b:.3f}")
    if args.svg:
        args.svg.write_text(growth_svg(peaks, a, b), encoding="utf-8")
        print(f"plot written to {args.svg}")


if __name__ == "__main__":
    main()
