"""Prime sweep a = diag(1, p): write the discrepancy report and per-bucket medians.

    python scripts/prime_sweep.py --hi 10000 --out sweep.csv
"""

import argparse
import csv
import time
from pathlib import Path

from heckelab.driver import prime_spec, summarize, sweep, to_csv
from heckelab.hyperbolic import MeasureConfig, UHPoint
from heckelab.observables import builtin_family, reference_family


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--lo", type=int, default=2)
    ap.add_argument("--hi", type=int, default=10_000)
    ap.add_argument("--x", nargs="+", default=["0.3,1", "0,2", "0.1,5"])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="prime_sweep.csv")
    ap.add_argument("--curve", default=None, help="optional CSV of (base, p, degree, sup_dev)")
    args = ap.parse_args()

    cfg = MeasureConfig(seed=args.seed)
    family = tuple(builtin_family())
    t0 = time.perf_counter()
    refs = reference_family(family, cfg)
    print(f"references: {time.perf_counter() - t0:.1f}s")

    spec = prime_spec(args.lo, args.hi, [UHPoint.parse(x) for x in args.x], family=family, measure=cfg)
    t0 = time.perf_counter()
    rows = sweep(spec, refs, threads=args.threads)
    print(f"sweep: {len(rows)} (a, x) items in {time.perf_counter() - t0:.1f}s")
    Path(args.out).write_text(to_csv(rows), encoding="utf-8", newline="\n")

    if args.curve:
        with open(args.curve, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["base", "p", "degree", "sup_dev"])
            for r in rows:
                w.writerow([r.base.format(), r.det, r.degree, repr(r.sup_deviation)])

    for s in summarize(rows):
        print(s.line())


if __name__ == "__main__":
    main()
