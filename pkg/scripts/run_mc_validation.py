"""Run the standard Monte Carlo validation grid and write the comparison table.

    python3 scripts/run_mc_validation.py --n 1000000 --seed 42 --out mc_validation.csv
"""

import argparse
import sys
import time

from oscexit.cli import write_rows
from oscexit.validation import run_validation


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="mc_validation.csv")
    args = ap.parse_args()

    t0 = time.perf_counter()
    rows = run_validation(n=args.n, seed=args.seed, workers=args.workers)
    with open(args.out, "w", newline="") as fh:
        write_rows([r.__dict__ for r in rows], fh, "csv")
    for r in rows:
        flag = "ok  " if r.passed else "FAIL"
        print(f"{flag} {r.functional:<22} {r.params:<45} z={r.z_score:+.2f}")
    print(f"{sum(r.passed for r in rows)}/{len(rows)} cells pass, {time.perf_counter() - t0:.1f} s")
    return 0 if all(r.passed for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
