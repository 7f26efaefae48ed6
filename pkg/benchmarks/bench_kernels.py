"""Compare the compiled and pure-Python kernels on the same workloads.

Usage: python benchmarks/bench_kernels.py [--repeat 3] [--h 0.0078125]
"""
import argparse
import math
import time

import numpy as np

from warpmetric import _pykernels
from warpmetric.engine import distance_grid
from warpmetric.warping import WarpProfile

try:
    from warpmetric import _ckernels
except ImportError:
    _ckernels = None


def _time(fn, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def bench_dual(mod, repeat):
    rng = np.random.default_rng(0)
    cases = [(rng.uniform(0.01, 0.3, 6), rng.uniform(0.25, 4, 6), rng.uniform(0, 1), rng.uniform(0.2, 2))
             for _ in range(2000)]

    def run():
        return sum(mod.dual_optimum(w, v, D, c)[0] for w, v, D, c in cases)
    return _time(run, repeat)


def bench_grid(mod, h, repeat):
    import warpmetric.kernels as k
    profile = WarpProfile((0.0, 0.2, 0.45, 0.7, 1.0), (1.0, 0.3, 2.5, 1.0))
    saved = k.grid_dijkstra
    k.grid_dijkstra = mod.grid_dijkstra
    try:
        return _time(lambda: distance_grid(profile, (0.05, 0.1), (0.95, 0.85), h).value, repeat)
    finally:
        k.grid_dijkstra = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--h", type=float, default=1 / 128)
    args = ap.parse_args()
    mods = [("python", _pykernels)] + ([("compiled", _ckernels)] if _ckernels is not None else [])
    rows = []
    for name, mod in mods:
        t_dual, v_dual = bench_dual(mod, args.repeat)
        t_grid, v_grid = bench_grid(mod, args.h, args.repeat)
        rows.append((name, t_dual, v_dual, t_grid, v_grid))
    print(f"{'backend':<10} {'dual x2000 [s]':>15} {'grid h=%g [s]' % args.h:>18} {'grid value':>14}")
    for name, td, vd, tg, vg in rows:
        print(f"{name:<10} {td:>15.4f} {tg:>18.4f} {vg:>14.9f}")
    if len(rows) == 2:
        (_, td0, vd0, tg0, vg0), (_, td1, vd1, tg1, vg1) = rows
        print(f"speedup    dual {td0 / td1:.1f}x   grid {tg0 / tg1:.1f}x")
        print(f"agreement  dual {abs(vd0 - vd1):.2e}   grid {abs(vg0 - vg1):.2e}")
    else:
        print("compiled kernels unavailable; showing the fallback only")


if __name__ == "__main__":
    main()
