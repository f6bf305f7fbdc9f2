"""Regenerate src/horolab/data/golden.csv and calibration.json.

Run once after a deliberate numerical change; the acceptance tests compare
fresh runs (different seeds) against these files.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import time
from pathlib import Path

from horolab import calibration as cal
from horolab import experiments as ex
from horolab.golden import CALIBRATION_JSON, GOLDEN_CSV
from horolab.modular import point_from_element
from horolab.psl2 import GroupElement
from horolab.sieve import (
    SieveWeightParams,
    build_sieve_table,
    first_error_sum,
    goldston_lemma1,
    goldston_lemma2,
    nu_average,
    nu_progression_average,
    second_error_sum,
)
from horolab.testfun import make_height_function

DATA = Path(__file__).resolve().parents[1] / "src" / "horolab" / "data"
ROOT2 = GroupElement(1.0, 0.0, math.sqrt(2.0), 1.0)


def log(msg):
    print(f"[{time.strftime('%H:%M:%S')}] {msg}", file=sys.stderr)


def golden_sieve_rows(tab):
    rows = []
    for k in (1, 2, 3, 4, 6):
        c = goldston_lemma1(1e4, k, "unit", tab)
        rows.append(("lemma1-unit", 1e4, k, c.lhs, c.rhs, c.residual))
    for k in (1, 2, 4, 6):
        c = goldston_lemma1(1e4, k, "phi", tab)
        rows.append(("lemma1-phi", 1e4, k, c.lhs, c.rhs, c.residual))
    for k in (1, 2):
        c = goldston_lemma2(1e5, k, tab)
        rows.append(("lemma2", 1e5, k, c.lhs, c.rhs, c.residual))
    avg = nu_average(10**7, SieveWeightParams(100.0), tab)
    rows.append(("nu-average-N10000000", 100.0, 0, avg, 1.0, avg - 1.0))
    for q in (1, 2, 3):
        r = nu_progression_average(1, 10**6, q, 1, SieveWeightParams(50.0), tab)
        rows.append((f"progression-average-q{q}", 50.0, 1, r.lhs, r.main_term, r.residual))
    for R in (1e3, 1e4, 1e5, 1e6):
        rows.append(("first-error-sum-half", R, 0, first_error_sum(R, 0.5), math.log(math.log(R)), math.nan))
        rows.append(("second-error-sum-half", R, 0, second_error_sum(R, tab, 0.5), math.log(math.log(R)), math.nan))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=DATA)
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)

    log("sieve table")
    tab = build_sieve_table(10**7)
    rows = golden_sieve_rows(tab)
    with (args.out / GOLDEN_CSV).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("op", "R", "k", "lhs", "rhs", "residual"))
        for r in rows:
            w.writerow([r[0], repr(float(r[1])), r[2], *(repr(float(v)) for v in r[3:])])

    out = {}
    log("r * y_T spread")
    spreads = {str(s): cal.spread_constant(cal.prop42_products(s)) for s in (1, 2)}
    out["r_yT"] = {
        "config": dataclasses.asdict(cal.Prop42Config()),
        "spread_by_seed": spreads,
        "C": cal.safe(max(spreads.values())),
    }

    log("closed-horocycle approximation")
    st = cal.approx_stats(1)
    out["approximant"] = {
        "config": dataclasses.asdict(cal.ApproxConfig()),
        "seed": 1,
        "stats": dataclasses.asdict(st),
        "C": cal.safe(st.worst),
    }

    f = make_height_function(2.0, 0.25)
    xi = point_from_element(ROOT2)
    avg = next(r for r in rows if r[0].startswith("nu-average"))[3]
    out["nu_average"] = {"N": 10**7, "R": 100.0, "value": avg, "tolerance": 0.25}

    log("prime non-concentration")
    pr = ex.prime_nonconcentration(xi, 1e7, f, 0.1, tab)
    out["primes"] = {"T": 1e7, "theta": 0.1, "f": f.label, **pr._asdict()}

    log("sparse averages at a low point")
    recs = ex.venkatesh_scan(xi, 1e5, [1, 2, 3], f)
    out["venkatesh_low_point"] = {
        "T": 1e5,
        "s": [r.s for r in recs],
        "r_over_T": recs[0].r / 1e5,
        "max_discrepancy": max(r.discrepancy for r in recs),
    }

    log("small progressions on closed horocycles")
    worst = 0.0
    for P in (20.0, 50.0, 100.0):
        for q in (12, 30, 60):
            s_list = [s for s in range(1, 7) if q % s == 0]
            for rec in ex.smallaps_experiment(P, q, s_list, 1e5, f, x0=0.1):
                worst = max(worst, rec.measured / rec.venkatesh_ref)
    out["smallaps"] = {"P": [20.0, 50.0, 100.0], "q": [12, 30, 60], "K": 1e5, "ratio_max": worst, "C": cal.safe(worst)}

    (args.out / CALIBRATION_JSON).write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
    log(f"wrote {args.out}")


if __name__ == "__main__":
    main()
