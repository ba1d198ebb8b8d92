"""Tabulate the two-sided exit transforms of an oscillating model over (x, s).

Writes plot-ready CSV; columns: s, x, down, up, sum.

    python3 scripts/scan_exit_transforms.py --model scripts/oscillating_model.json --B 1
"""

import argparse
import csv
import sys

import numpy as np

from oscexit.functionals import osc_exit_interval_lt
from oscexit.levy import load_model
from oscexit.validation import OSCILLATING


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model")
    ap.add_argument("--B", type=float, default=1.0)
    ap.add_argument("--z", type=float, default=0.0)
    ap.add_argument("--s", type=float, nargs="+", default=[0.01, 0.1, 1.0, 10.0, 100.0])
    ap.add_argument("--points", type=int, default=21)
    ap.add_argument("--out", default="exit_scan.csv")
    args = ap.parse_args()

    model = load_model(args.model) if args.model else OSCILLATING
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "x", "down", "up", "sum"])
        for s in args.s:
            for x in np.linspace(0.0, args.B, args.points):
                down, up = osc_exit_interval_lt(model, float(x), args.B, args.z, s)
                w.writerow([f"{v:.17g}" for v in (s, x, down, up, down + up)])
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
