"""Vacuum-seeded OPG: depletion and supermode squeezing versus step count, scheme and loss.

    python scripts/opg_convergence.py --steps 100 200 400 --schemes rk4ip strang-rk4
    python scripts/opg_convergence.py --steps 200 --fh-loss-db-m 30 60
"""

import argparse
import logging
import time
from pathlib import Path

import numpy as np

from gssf import io, scenarios as sc
from gssf.chi2 import chi2_propagate
from gssf.supermodes import decompose

log = logging.getLogger("opg_convergence")


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--steps", type=int, nargs="+", default=[200])
    ap.add_argument("--schemes", nargs="+", default=["rk4ip"])
    ap.add_argument("--fh-loss-db-m", type=float, nargs="+", default=[30.0])
    ap.add_argument("--M", type=int, default=1024)
    ap.add_argument("--out", default="runs/opg_convergence")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")

    cols = {k: [] for k in ("steps", "scheme", "fh_loss_db_m", "depletion_pJ", "asq0_db",
                            "sq0_db", "n_above_60db", "wall_s")}
    for loss in args.fh_loss_db_m:
        for scheme in args.schemes:
            for steps in args.steps:
                scn = sc.OPG.with_(steps=steps, M=args.M, fh_loss_db_m=loss)
                grid, st, p = scn.build()
                p.scheme = scheme
                t0 = time.perf_counter()
                final = chi2_propagate(st, p).final
                dec = decompose(final, "a")
                wall = time.perf_counter() - t0
                dep = (sc.sh_energy(scn, st) - sc.sh_energy(scn, final)) * 1e12
                row = (steps, scheme, loss, dep, dec.antisqueeze_db[0], dec.squeeze_db[0],
                       int(np.sum(dec.antisqueeze_db > 60)), wall)
                for k, v in zip(cols, row):
                    cols[k].append(v)
                log.info("loss %g dB/m %s %d steps: depletion %.3f pJ, antisqueezing %.2f dB, "
                         "squeezing %.2f dB (%.0f s)", loss, scheme, steps, dep,
                         dec.antisqueeze_db[0], dec.squeeze_db[0], wall)
    scheme_code = {s: i for i, s in enumerate(args.schemes)}
    cols["scheme"] = [scheme_code[s] for s in cols["scheme"]]
    out = Path(args.out)
    io.write_csv(out / "opg_convergence.csv", {k: np.array(v, float) for k, v in cols.items()})
    io.write_manifest(out / "schemes.json", scheme_code)


if __name__ == "__main__":
    main()
