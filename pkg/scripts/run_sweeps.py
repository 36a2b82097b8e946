"""Run the oracle, single-equation and family sweeps; write one CSV per sweep."""

import argparse
import pathlib
import sys
import time

from cosetbounds.harness import SWEEPS, run_sweep, to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=20240601)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--outdir", default="sweeps")
    ap.add_argument("--only", choices=sorted(SWEEPS), action="append")
    args = ap.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    violated = 0
    for kind in args.only or SWEEPS:
        t0 = time.perf_counter()
        recs = run_sweep(kind, args.seed, workers=args.workers)
        (outdir / f"{kind}.csv").write_text(to_csv(recs))
        bad = [r for r in recs if r.violated]
        violated += len(bad)
        ratios = [r.count / (r.bound_th1 or r.bound_thsr) for r in recs if (r.bound_th1 or r.bound_thsr)]
        print(f"{kind:7s} {len(recs):4d} records  violations {len(bad)}  "
              f"max count/bound {max(ratios, default=0):.4f}  {time.perf_counter() - t0:.1f}s")
    return 1 if violated else 0


if __name__ == "__main__":
    sys.exit(main())
