"""Command line front end: `horolab <verb> [flags]`.

Exit status: 0 on success, 2 on a violated precondition or bad input,
3 when a table would exceed its capacity.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from typing import Any

import numpy as np

from horolab import approx as approx_mod
from horolab import experiments as ex
from horolab.errors import CapacityError, DegeneratePeriodic, DomainError
from horolab.modular import (
    SurfacePoint,
    dist_to_base,
    fundamental_period,
    point_from_element,
    r_parameter,
    reduce_element,
    reduce_point,
)
from horolab.psl2 import GroupElement, format_element, iwasawa, parse_element
from horolab.sieve import (
    SieveWeightParams,
    build_sieve_table,
    goldston_lemma1,
    goldston_lemma2,
    nu_average,
    nu_progression_average,
    siegel_walfisz_check,
)
from horolab.testfun import parse_function

EXIT_OK, EXIT_PRECONDITION, EXIT_CAPACITY = 0, 2, 3
GOLDEN_HEADER = ("op", "R", "k", "lhs", "rhs", "residual")


def _jsonable(obj: Any):
    if isinstance(obj, GroupElement):
        return format_element(obj)
    if isinstance(obj, SurfacePoint):
        c = iwasawa(obj.rep)
        return {"rep": format_element(obj.rep), "reducer": format_element(obj.reducer), "x": c.x, "y": c.y, "theta": c.theta}
    if dataclasses.is_dataclass(obj):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, tuple) and hasattr(obj, "_fields"):
        return {k: _jsonable(v) for k, v in obj._asdict().items()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _emit(obj, args, out) -> None:
    if args.out == "csv" and isinstance(obj, list) and obj and isinstance(obj[0], ex.ExperimentRecord):
        out.write(ex.records_to_csv(obj))
        return
    if args.out == "csv":
        rows = obj if isinstance(obj, list) else [obj]
        rows = [_jsonable(r) for r in rows]
        w = csv.DictWriter(out, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()})
        return
    json.dump(_jsonable(obj), out, indent=2, sort_keys=False)
    out.write("\n")


def _floats(text) -> list[float]:
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, list):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _ints(text) -> list[int]:
    return [int(round(v)) for v in _floats(text)]


def _point(args) -> SurfacePoint:
    if args.g is None:
        raise DomainError("--g a,b,c,d is required")
    return point_from_element(parse_element(args.g))


def _single_T(args) -> float:
    Ts = _floats(args.T)
    if len(Ts) != 1:
        raise DomainError("this verb takes a single --T")
    return Ts[0]


def _table_for(n: float):
    return build_sieve_table(max(2, math.floor(n)))


# ---- verbs -------------------------------------------------------------------


def cmd_sieve_check(args):
    R = args.R if args.R is not None else 1000.0
    ks = _ints(args.k) if args.k is not None else [1, 2]
    if args.op == "nu-average":
        N = int(_single_T(args)) if args.T is not None else 10**6
        tab = _table_for(max(N, R))
        avg = nu_average(N, SieveWeightParams(R), tab)
        return [dict(zip(GOLDEN_HEADER, ("nu-average", R, 0, avg, 1.0, avg - 1.0)))]
    tab = _table_for(R + 1)
    rows = []
    for kk in ks:
        if args.op == "lemma2":
            chk = goldston_lemma2(R, kk, tab)
        else:
            chk = goldston_lemma1(R, kk, args.op.split("-")[1], tab)
        rows.append(dict(zip(GOLDEN_HEADER, (args.op, R, kk, chk.lhs, chk.rhs, chk.residual))))
    return rows


def cmd_sw_check(args):
    R = args.R if args.R is not None else 3.0
    q = args.q
    length = int(args.length) if args.length is not None else math.ceil(q * R**3)
    start = int(args.start)
    tab = _table_for(max(start + length, q * (start + length) + q, R + 1))
    rng = np.random.default_rng(args.seed)
    f = rng.uniform(-1.0, 1.0, size=q)
    p = SieveWeightParams(R)
    sw = siegel_walfisz_check(start, length, q, f.tolist(), p, tab)
    progs = [
        nu_progression_average(start, length, q, j, p, tab)
        for j in range(1, q + 1)
        if math.gcd(j, q) == 1
    ]
    return {"siegel_walfisz": sw, "f": f.tolist(), "progressions": progs}


def cmd_reduce(args):
    if args.z is not None:
        re_, im_ = _floats(args.z)
        z, gamma = reduce_point(complex(re_, im_))
        return {"z": [z.real, z.imag], "gamma": format_element(gamma)}
    return point_from_element(parse_element(args.g)) if args.g else reduce_element(parse_element("1,0,0,1"))


def cmd_fundamental_period(args):
    return fundamental_period(_point(args), _single_T(args))


def cmd_r_param(args):
    p = _point(args)
    T = _single_T(args)
    r = r_parameter(p, T)
    fp = fundamental_period(p, T)
    return {"T": T, "r": r, "yT": fp.yT, "r_times_yT": r * fp.yT, "dist_to_base": dist_to_base(p), "regime_ratio": ex.regime_ratio(r, T)}


def cmd_approx(args):
    p = _point(args)
    T = _single_T(args)
    K = args.K if args.K is not None else T ** (1.0 / 3.0)
    t0 = args.t0 if args.t0 is not None else T / 2
    rep = approx_mod.approximant(p, T, t0, K, args.delta, args.eta, args.samples)
    return rep


def cmd_orbit_sum(args):
    p = _point(args)
    f = parse_function(args.f)
    recs = []
    for T in _floats(args.T):
        tab = _table_for(T) if args.weight != "uniform" else None
        R = args.R
        recs.extend(ex.discrepancy_experiment(p, [T], args.weight, f, args.theta, tab, R, args.s, args.beta, args.threads))
    return recs


def cmd_discrepancy(args):
    p = _point(args)
    f = parse_function(args.f)
    Ts = _floats(args.T)
    tab = _table_for(max(Ts)) if args.weight != "uniform" else None
    return ex.discrepancy_experiment(p, Ts, args.weight, f, args.theta, tab, args.R, args.s, args.beta, args.threads)


def cmd_primes(args):
    p = _point(args)
    f = parse_function(args.f)
    T = _single_T(args)
    rep = ex.prime_nonconcentration(p, T, f, args.theta, _table_for(T), args.threads)
    return {"T": T, "theta": args.theta, **rep._asdict()}


def cmd_venkatesh(args):
    p = _point(args)
    f = parse_function(args.f)
    s_list = _floats(args.s_list) if args.s_list else [args.s]
    return ex.venkatesh_scan(p, _single_T(args), s_list, f, args.beta, args.threads)


def cmd_smallaps(args):
    f = parse_function(args.f)
    s_list = _ints(args.s_list) if args.s_list else [1]
    K = args.K if args.K is not None else 1e5
    return ex.smallaps_experiment(args.P, args.q, s_list, K, f, args.beta)


VERBS = {
    "sieve-check": cmd_sieve_check,
    "sw-check": cmd_sw_check,
    "reduce": cmd_reduce,
    "fundamental-period": cmd_fundamental_period,
    "r-param": cmd_r_param,
    "approx": cmd_approx,
    "orbit-sum": cmd_orbit_sum,
    "discrepancy": cmd_discrepancy,
    "primes": cmd_primes,
    "venkatesh": cmd_venkatesh,
    "smallaps": cmd_smallaps,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default flag values")
    common.add_argument("--g", help="group element a,b,c,d")
    common.add_argument("--z", help="point re,im")
    common.add_argument("--T", help="time horizon (comma list where several are allowed)")
    common.add_argument("--s", type=float, default=1.0)
    common.add_argument("--s-list", dest="s_list", help="comma list of steps")
    common.add_argument("--R", type=float)
    common.add_argument("--theta", type=float, default=ex.THETA_DEFAULT)
    common.add_argument("--beta", type=float, default=ex.BETA_DEFAULT)
    common.add_argument("--delta", type=float, default=0.1)
    common.add_argument("--K", type=float)
    common.add_argument("--eta", type=float)
    common.add_argument("--t0", type=float)
    common.add_argument("--samples", type=int, default=101)
    common.add_argument("--f", default="height:Y=2,w=0.25")
    common.add_argument("--weight", choices=("uniform", "nu", "prime"), default="uniform")
    common.add_argument("--out", choices=("csv", "json"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--op", choices=("lemma1-unit", "lemma1-phi", "lemma2", "nu-average"), default="lemma1-unit")
    common.add_argument("--k", help="comma list of shifts k")
    common.add_argument("--q", type=int, default=1)
    common.add_argument("--start", type=int, default=1)
    common.add_argument("--length", type=int)
    common.add_argument("--P", type=float, default=50.0, help="closed-horocycle period")

    parser = argparse.ArgumentParser(prog="horolab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    for name in VERBS:
        sub.add_parser(name, parents=[common])
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        sub = parser._subparsers._group_actions[0].choices[args.verb]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known
        if unknown:
            raise DomainError(f"unknown config keys {sorted(unknown)}")
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = parse_args(argv)
        result = VERBS[args.verb](args)
        _emit(result, args, out)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (DomainError, DegeneratePeriodic, ValueError) as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
