"""Run the desk-scale equidistribution experiments and write their CSV tables.

Outputs (in --out): discrepancy_uniform.csv, discrepancy_nu.csv,
venkatesh.csv and smallaps.csv. Every table is deterministic for a given
set of flags, independent of --threads.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from pathlib import Path

from horolab import experiments as ex
from horolab.modular import point_from_element
from horolab.psl2 import GroupElement
from horolab.sieve import build_sieve_table
from horolab.testfun import parse_function


def log(msg):
    print(f"[{time.strftime('%H:%M:%S')}] {msg}", file=sys.stderr)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--lam", type=float, default=math.sqrt(2.0), help="xi = [[1,0],[lam,1]]")
    ap.add_argument("--f", default="height:Y=2,w=0.25")
    ap.add_argument("--T-max", dest="T_max", type=float, default=1e6)
    ap.add_argument("--R", type=float, default=100.0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)

    xi = point_from_element(GroupElement(1.0, 0.0, args.lam, 1.0))
    f = parse_function(args.f)
    Ts = [10.0**e for e in range(3, int(math.log10(args.T_max)) + 1)]

    log("uniform discrepancy")
    recs = ex.discrepancy_experiment(xi, Ts, "uniform", f, threads=args.threads)
    (args.out / "discrepancy_uniform.csv").write_text(ex.records_to_csv(recs))

    log("nu-weighted discrepancy")
    tab = build_sieve_table(int(max(Ts)))
    recs = ex.discrepancy_experiment(xi, Ts, "nu", f, sieve=tab, R=args.R, threads=args.threads)
    (args.out / "discrepancy_nu.csv").write_text(ex.records_to_csv(recs))

    log("sparse averages")
    recs = ex.venkatesh_scan(xi, max(Ts), [1, 2, 4, 8, 16], f, threads=args.threads)
    (args.out / "venkatesh.csv").write_text(ex.records_to_csv(recs))

    log("small progressions on closed horocycles")
    with (args.out / "smallaps.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("P", *ex.SmallAPRecord._fields))
        for P in (20.0, 50.0, 100.0):
            for q in (12, 30, 60):
                s_list = [s for s in range(1, 7) if q % s == 0]
                for rec in ex.smallaps_experiment(P, q, s_list, 1e5, f):
                    w.writerow((repr(P), *(repr(v) if isinstance(v, float) else v for v in rec)))
    log(f"wrote {args.out}")


if __name__ == "__main__":
    main()
