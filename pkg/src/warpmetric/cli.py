"""Command-line front end.

Exit codes: 0 success, 1 failed invariant, 2 usage or parse error, 3 resource
or output error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import kernels
from .analysis import (REGISTRY, PairSampler, almost_lipschitz_offset, convergence_report, lipschitz_counterexample,
                       lipschitz_envelope)
from .base import SQRT2, BaseSpec, ProductSpec, product_distance, taxi_distance_array, product_distance_array
from .engine import DEFAULT_H, DEFAULT_TOL, distance_candidates, distance_grid, metric_handle_from_profile
from .errors import ResourceError, UsageError, WarpMetricError
from .oracles import ORACLE_NAMES
from .warping import FAMILIES, WarpProfile, covering_radius, euclidean_sample, family_member

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
OUT_ENV = "WARPMETRIC_OUT"


def _point(text: str) -> tuple[float, float]:
    try:
        a, b = text.split(",")
        return float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,fiber but got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        out = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not out or any(n < 1 for n in out):
        raise argparse.ArgumentTypeError("n values must be positive integers")
    return out


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _add_profile_args(p: argparse.ArgumentParser, n_list: bool = False) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--family", choices=FAMILIES, help="built-in profile family")
    src.add_argument("--profile", type=Path, help="profile file in the line-oriented literal format")
    if n_list:
        p.add_argument("--n", type=_int_list, default=[10, 50, 100], help="comma-separated family indices")
    else:
        p.add_argument("--n", type=int, default=1, help="family index")
    p.add_argument("--alpha", type=_positive, default=1.0, help="blow-up exponent")


def _add_solver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solver", choices=("candidate", "grid"), default="candidate")
    p.add_argument("--tol", type=_positive, default=DEFAULT_TOL)
    p.add_argument("--h", type=_positive, default=DEFAULT_H, help="grid step")


def _add_sampler_args(p: argparse.ArgumentParser, count: int = 200) -> None:
    p.add_argument("--sampler", choices=("adversarial", "random", "grid"), default="adversarial")
    p.add_argument("--count", type=int, default=count)
    p.add_argument("--resolution", type=int, default=9)
    p.add_argument("--seed", type=int, default=0)


def _load_profile(args, n: int | None = None) -> WarpProfile:
    if getattr(args, "profile", None) is not None:
        try:
            text = args.profile.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read profile: {exc}") from None
        return WarpProfile.from_text(text)
    family = args.family or "constant"
    return family_member(family, args.n if n is None else n, args.alpha)


def _sampler(args, profile: WarpProfile | None = None) -> PairSampler:
    abscissae = profile.special_abscissae if profile is not None else ()
    spec = ProductSpec(profile.t0, profile.t1) if profile is not None else ProductSpec()
    return PairSampler(args.sampler, args.count, args.resolution, args.seed, abscissae, spec)


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get(OUT_ENV) or ".")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ResourceError(f"cannot create output directory {out}: {exc}") from None
    return out


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise ResourceError(f"cannot write {path}: {exc}") from None


# ------------------------------------------------------------------ dist

def cmd_dist(args) -> int:
    profile = _load_profile(args)
    base = BaseSpec(args.base, args.length)
    if args.solver == "grid":
        r = distance_grid(profile, args.p, args.q, args.h, base)
    else:
        r = distance_candidates(profile, args.p, args.q, args.tol, base, args.method)
    if args.json:
        print(json.dumps({"value": r.value, "solver": r.solver, "error_bound": r.error_bound,
                          "epsilon_realizing": r.epsilon_realizing, "path": [list(v) for v in r.path.vertices]}))
        return EXIT_OK
    print(f"value {r.value:.12g}")
    print(f"solver {r.solver}")
    print(f"error_bound {r.error_bound:.3g}")
    print(f"epsilon_realizing {str(r.epsilon_realizing).lower()}")
    print("path " + " ".join(f"{v.x:.12g},{v.fiber:.12g}" for v in r.path.vertices))
    return EXIT_OK


# ----------------------------------------------------------------- sweep

def cmd_sweep(args) -> int:
    if args.limit is not None and args.limit not in ORACLE_NAMES:
        raise UsageError(f"unknown limit oracle {args.limit!r}; choose from {', '.join(ORACLE_NAMES)}")
    family = args.family or "constant"
    sampler = None
    if args.sampler != "adversarial":
        sampler = PairSampler(args.sampler, args.count, args.resolution, args.seed)
    report = convergence_report(family, args.n, args.alpha, args.limit, sampler, args.solver, args.tol, args.h)
    out = _out_dir(args)
    stem = f"sweep_{family}"
    if args.format in ("json", "both"):
        _write(out / f"{stem}.json", report.to_json() + "\n")
    if args.format in ("csv", "both"):
        _write(out / f"{stem}.csv", report.to_csv())
    for r in report.records:
        extra = f" error={r.error}" if r.error else ""
        print(f"n={r.n} sup_diff={r.sup_diff:.6g} budget={r.budget:.3g} pass={str(r.passed).lower()}{extra}")
    print(f"fitted_exponent={report.fitted_exponent} decreasing={str(report.decreasing).lower()}")
    return EXIT_OK if report.passed else EXIT_FAIL


# ----------------------------------------------------------------- check

def _suite_axioms(profile, args, tol):
    m = metric_handle_from_profile(profile, "candidate", tol=tol)
    pairs = _sampler(args, profile).pairs()
    pts = [p for p, _ in pairs] + [q for _, q in pairs]
    fails = []
    k = len(pts)
    for i in range(min(args.count, k)):
        a, b, c = pts[i], pts[(7 * i + 3) % k], pts[(13 * i + 5) % k]
        ab, ba, bc, ac = m(a, b), m(b, a), m(b, c), m(a, c)
        if m(a, a) != 0.0:
            fails.append({"suite": "axioms", "kind": "identity", "witness": [a], "margin": m(a, a)})
        if abs(ab - ba) > tol:
            fails.append({"suite": "axioms", "kind": "symmetry", "witness": [a, b], "margin": abs(ab - ba)})
        if ac > ab + bc + 3 * tol:
            fails.append({"suite": "axioms", "kind": "triangle", "witness": [a, b, c], "margin": ac - ab - bc})
    return fails


def _suite_monotonicity(profile, args, tol):
    g = WarpProfile(profile.breakpoints, tuple(0.5 * v for v in profile.strip_values),
                    tuple((k, 0.5 * v) for k, v in profile.point_overrides), "half")
    fails = []
    for p, q in _sampler(args, profile).pairs():
        margin = distance_candidates(profile, p, q, tol).value - distance_candidates(g, p, q, tol).value
        if margin < -2 * tol:
            fails.append({"suite": "monotonicity", "witness": [p, q], "margin": margin})
    return fails


def _suite_sandwich(profile, args, tol):
    s = PairSampler("grid", resolution=args.resolution)
    xp, yp, xq, yq = s.arrays()
    d = product_distance_array(xp, yp, xq, yq)
    t = taxi_distance_array(xp, yp, xq, yq)
    bad = (t < d - 1e-12) | (t > SQRT2 * d + 1e-12)
    fails = []
    for i in bad.nonzero()[0][:10]:
        fails.append({"suite": "sandwich", "witness": [[xp[i], yp[i]], [xq[i], yq[i]]], "margin": float(t[i] - d[i])})
    return fails


def _dense_set(profile: WarpProfile, step: float):
    try:
        return euclidean_sample(profile, step)
    except UsageError:
        count = int(round((profile.t1 - profile.t0) / step))
        pts = [profile.t0 + k * (profile.t1 - profile.t0) / count for k in range(count + 1)]
        from .warping import DenseSubset
        return DenseSubset(tuple(pts), covering_radius(pts, profile.t0, profile.t1))


def _suite_dense(profile, args, tol):
    Q = _dense_set(profile, args.step)
    C = max(1.0, profile.supremum_on_set(Q))
    m = metric_handle_from_profile(profile, "candidate", tol=tol)
    off = almost_lipschitz_offset(m, C, _sampler(args, profile))
    limit = 2 * Q.claimed_radius + m.budget
    if off > limit:
        return [{"suite": "dense", "witness": None, "margin": limit - off}]
    return []


def _suite_lower(profile, args, tol):
    lo = min(1.0, profile.global_bounds()[0])
    fails = []
    for p, q in _sampler(args, profile).pairs():
        v = distance_candidates(profile, p, q, tol).value
        margin = v - lo * product_distance(p, q, ProductSpec(profile.t0, profile.t1))
        if margin < -tol:
            fails.append({"suite": "lower", "witness": [p, q], "margin": margin})
    return fails


def _suite_counterexample(profile, args, tol):
    fails = []
    for n in args.ce_n:
        (p, q), ratio = lipschitz_counterexample(n, args.alpha, tol=tol)
        want = float(n) ** args.alpha
        if abs(ratio - want) > 1e-6 * want:
            fails.append({"suite": "counterexample", "witness": [p, q], "margin": ratio - want})
        else:
            print(f"  counterexample n={n} alpha={args.alpha:g} ratio={ratio:.9g}")
    return fails


SUITES = {
    "axioms": _suite_axioms,
    "monotonicity": _suite_monotonicity,
    "sandwich": _suite_sandwich,
    "dense": _suite_dense,
    "lower": _suite_lower,
    "counterexample": _suite_counterexample,
}


def cmd_check(args) -> int:
    profile = _load_profile(args)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failures = []
    for name in names:
        got = SUITES[name](profile, args, args.tol)
        print(f"{name}: {'PASS' if not got else 'FAIL'}")
        failures.extend(got)
    if failures:
        print(json.dumps({"failures": failures}, default=lambda o: list(o)))
        return EXIT_FAIL
    return EXIT_OK


# --------------------------------------------------------------- gallery

TRACE_PAIRS = {
    "constant": ((0.1, 0.2), (0.9, 0.7)),
    "s_n": ((0.5, 0.1), (0.5, 0.9)),
    "h_n": ((0.5, 0.1), (0.5, 0.9)),
    "z_n": ((0.3, 0.1), (0.3, 0.9)),
    "k_n": ((0.0, 0.2), (0.0, 0.8)),
    "w_n": ((0.0, 0.1), (0.0, 0.9)),
    "v_n": ((0.2, 0.3), (0.4, 0.7)),
}


def cmd_gallery(args) -> int:
    out = _out_dir(args)
    families = [args.family] if args.family else list(REGISTRY)
    sampler = PairSampler(args.sampler, args.count, args.resolution, args.seed)
    for family in families:
        report = convergence_report(family, args.n, args.alpha, None, sampler)
        lines = [f"# {family} alpha={args.alpha:g} limit={report.limit}", "# n sup_diff bound"]
        for r in report.records:
            bound = "nan" if r.bound is None else repr(r.bound)
            lines.append(f"{r.n} {r.sup_diff!r} {bound}")
        _write(out / f"gallery_{family}.dat", "\n".join(lines) + "\n")
        p, q = TRACE_PAIRS[family]
        res = distance_candidates(family_member(family, args.trace_n, args.alpha), p, q)
        trace = [f"# {family} n={args.trace_n} geodesic from {p} to {q} length={res.value!r}", "# x y"]
        trace += [f"{v.x!r} {v.fiber!r}" for v in res.path.vertices]
        _write(out / f"trace_{family}.dat", "\n".join(trace) + "\n")
        print(f"{family}: gallery_{family}.dat trace_{family}.dat")
    return EXIT_OK


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="warpmetric", description="Distances in warped product length spaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s 0.1.0 ({kernels.BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="distance between two points")
    _add_profile_args(p)
    _add_solver_args(p)
    p.add_argument("--method", choices=("dual", "descent"), default="dual", help="candidate optimizer")
    p.add_argument("--p", type=_point, required=True, help="first point as x,fiber")
    p.add_argument("--q", type=_point, required=True, help="second point as x,fiber")
    p.add_argument("--base", choices=("interval", "circle"), default="interval")
    p.add_argument("--length", type=_positive, default=1.0, help="fiber length")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("sweep", help="convergence report for a family")
    p.add_argument("--family", choices=FAMILIES, default="constant")
    p.add_argument("--n", type=_int_list, default=[10, 50, 100])
    p.add_argument("--alpha", type=_positive, default=1.0)
    p.add_argument("--limit", default=None, help=f"limit oracle ({', '.join(ORACLE_NAMES)})")
    _add_solver_args(p)
    _add_sampler_args(p, count=500)
    p.add_argument("--format", choices=("json", "csv", "both"), default="both")
    p.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or .)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="run invariant suites")
    _add_profile_args(p)
    p.add_argument("--suite", choices=("all",) + tuple(SUITES), default="all")
    p.add_argument("--tol", type=_positive, default=DEFAULT_TOL)
    p.add_argument("--step", type=_positive, default=1 / 64, help="lattice step for the dense-subset suite")
    p.add_argument("--ce-n", type=_int_list, default=[4, 8, 16], help="n values for the counterexample suite")
    _add_sampler_args(p, count=100)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gallery", help="plot-data files for every family")
    p.add_argument("--family", choices=FAMILIES, default=None)
    p.add_argument("--n", type=_int_list, default=[5, 10, 20, 40])
    p.add_argument("--alpha", type=_positive, default=1.0)
    p.add_argument("--trace-n", type=int, default=6)
    _add_sampler_args(p, count=200)
    p.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or .)")
    p.set_defaults(func=cmd_gallery)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except WarpMetricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
