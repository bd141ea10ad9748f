"""Per-step wall time versus M for the full two-envelope model (or the chi(3) model).

    python scripts/bench.py --M 256 512 1024 --kind chi2
"""

import argparse
import logging

import numpy as np

from gssf.cli import bench


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--M", type=int, nargs="+", default=[256, 512, 1024])
    ap.add_argument("--steps", type=int, default=3)
    ap.add_argument("--kind", choices=("chi2", "chi3"), default="chi2")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    rows = bench(args.M, args.steps, args.kind)
    for (M0, t0), (M1, t1) in zip(rows, rows[1:]):
        print(f"M {M0} -> {M1}: {t0:.3f} -> {t1:.3f} s/step, ratio {t1 / t0:.2f}")
    if len(rows) > 1:
        slope = np.polyfit(np.log([r[0] for r in rows]), np.log([r[1] for r in rows]), 1)[0]
        print(f"fitted exponent {slope:.2f} (M^2 log M gives about 2.1 over this range)")


if __name__ == "__main__":
    main()
