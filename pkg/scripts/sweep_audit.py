"""Audit random (or collinear) runs per N and print failures plus per-N epoch maxima.

    python scripts/sweep_audit.py --region square:4 --n 1..12 --seeds 100
"""

from __future__ import annotations

import argparse
import time

from unipart.cli_trace import default_epoch_bound, parse_int_range, parse_region
from unipart.experiments import per_n_max, sweep_audit
from unipart.verify import fit_linear_envelope


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--region", required=True)
    ap.add_argument("--n", default="1..12")
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--first-seed", type=int, default=0)
    ap.add_argument("--init", choices=("random", "collinear"), default="random")
    args = ap.parse_args()

    region = parse_region(args.region)
    t0 = time.time()
    rows = sweep_audit(region, parse_int_range(args.n), range(args.first_seed, args.first_seed + args.seeds), init=args.init)
    bad = [r for r in rows if not r.ok]
    for r in bad:
        print(f"FAIL N={r.n} seed={r.seed}: {'; '.join(r.problems)}")
    over = [r for r in rows if r.epochs > default_epoch_bound(region, r.n)]
    mx = per_n_max(rows)
    a, b = fit_linear_envelope(mx)
    print(f"runs={len(rows)} failures={len(bad)} over_bound={len(over)} time={time.time() - t0:.1f}s")
    print("per-N max epochs:", mx)
    print(f"linear envelope: epochs <= {a:.2f}*N + {b:.2f}")


if __name__ == "__main__":
    main()
