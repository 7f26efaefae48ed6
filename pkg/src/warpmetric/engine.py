"""Distance computation for piecewise-constant warping profiles.

Two solvers share one result type:

* ``distance_candidates`` minimizes over three route classes that together
  contain a shortest route: a refracted x-monotone route, a route with one
  fiber run at a special abscissa, and the straight line.  Each class is an
  exact one-dimensional concave maximization in the ray parameter (Snell's
  invariant), solved by bisection; a coordinate-descent variant is available
  for cross-checking.
* ``distance_grid`` runs Dijkstra on a lattice containing every breakpoint,
  override abscissa and both endpoints.  It always overestimates and serves as
  an independent oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .base import BaseSpec, CurvePolyline, ProductSpec, SpacePoint, generalized_line
from .errors import ResourceError, UsageError
from .warping import WarpProfile

DEFAULT_TOL = 1e-9
DEFAULT_H = 1.0 / 256
DEFAULT_NODE_CAP = 6_000_000
EPS_OFFSET = 1e-9
_TIE = 1e-12


@dataclass(frozen=True)
class DistanceResult:
    value: float
    path: CurvePolyline
    solver: str
    error_bound: float
    epsilon_realizing: bool = False
    route: str = ""


def _spec_for(profile: WarpProfile, base: BaseSpec | None) -> ProductSpec:
    return ProductSpec(profile.t0, profile.t1, base if base is not None else BaseSpec())


def segment_length(profile: WarpProfile, a: SpacePoint, b: SpacePoint, dy: float) -> float:
    """Length of the straight segment from ``a`` to ``b`` with fiber displacement ``dy``."""
    if a.x == b.x:
        return profile.evaluate(a.x) * abs(dy)
    dx = abs(b.x - a.x)
    total = 0.0
    for w, v in profile.pieces(a.x, b.x):
        total += w / dx * math.hypot(dx, v * dy)
    return total


def polyline_length(profile: WarpProfile, curve: CurvePolyline, base: BaseSpec | None = None) -> float:
    """Length of a polyline under ``profile``; exact for strip profiles."""
    spec = _spec_for(profile, base)
    verts = [spec.check(v) for v in curve.vertices]
    total = 0.0
    for a, b in zip(verts, verts[1:]):
        total += segment_length(profile, a, b, spec.base.signed_delta(a.fiber, b.fiber))
    return total


# ---------------------------------------------------------------- candidates

@dataclass(frozen=True)
class _Route:
    """Strip pieces before the turning abscissa, a run there, and pieces after."""

    kind: str
    x_turn: float
    before: tuple  # (x_start, x_end, value) in travel order
    after: tuple
    run_cost: float  # inf for no run
    attained: bool = True
    run_x: float | None = None  # where the run is drawn, if not at x_turn


def _oriented(profile: WarpProfile, a: float, b: float) -> tuple:
    """``(x_start, x_end, value)`` for each strip crossed from ``a`` to ``b``."""
    out = []
    x = a
    step = 1.0 if b >= a else -1.0
    for w, v in profile.pieces(a, b):
        out.append((x, x + step * w, v))
        x += step * w
    if out:
        out[-1] = (out[-1][0], b, out[-1][2])
    return tuple(out)


def _solve_dual(route: _Route, D: float):
    """Exact optimum of a route; returns ``(value, fiber_moves, run_length)``."""
    pieces = route.before + route.after
    widths = [abs(e - s) for s, e, _ in pieces]
    values = [v for _, _, v in pieces]
    if not pieces:
        return route.run_cost * D, [], D
    value, p = kernels.dual_optimum(widths, values, D, route.run_cost)
    moves = [w * p / (v * math.sqrt((v - p) * (v + p))) for w, v in zip(widths, values)]
    carried = sum(moves)
    if math.isfinite(route.run_cost) and p >= route.run_cost:
        return value, moves, max(D - carried, 0.0)
    # hand any bisection residue to the cheapest piece
    k = min(range(len(values)), key=lambda i: (values[i], -widths[i]))
    moves[k] += D - carried
    if moves[k] < 0:
        moves = [m * D / carried for m in moves]
    return value, moves, 0.0


def _ternary(fn: Callable[[float], float], lo: float, hi: float, width: float) -> float:
    while hi - lo > width:
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if fn(m1) <= fn(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


def _solve_descent(route: _Route, D: float, tol: float):
    """Cyclic coordinate descent over the fiber positions at segment ends.

    Segments are the route's pieces with the run inserted between ``before``
    and ``after``.  An interior run is parametrized by its start and length so
    that sliding it does not change its cost; every 1-D slice is convex and is
    minimized by ternary search.
    """
    pieces = route.before + route.after
    has_run = math.isfinite(route.run_cost)
    if not pieces:
        return route.run_cost * D, [], D
    segs = [(abs(e - s), v) for s, e, v in route.before]
    a = len(segs)
    if has_run:
        segs.append(None)
    segs += [(abs(e - s), v) for s, e, v in route.after]
    m = len(segs)

    def cost(z):
        total = 0.0
        for i, seg in enumerate(segs):
            dz = z[i + 1] - z[i]
            total += route.run_cost * abs(dz) if seg is None else math.hypot(seg[0], seg[1] * dz)
        return total

    weights = [0.0 if seg is None else seg[0] for seg in segs]
    if has_run and route.run_cost < min(v for _, _, v in pieces):
        # start with everything on the run when it is the cheapest carrier
        weights = [1.0 if i == a else 0.0 for i in range(m)]
    tot = sum(weights) or 1.0
    z = [0.0]
    for w in weights:
        z.append(z[-1] + D * w / tot)
    z[-1] = D
    coupled = has_run and 0 < a < m - 1  # run with free positions on both sides
    best = cost(z)
    for _ in range(200):
        for i in range(1, m):
            if coupled and i == a + 1:
                def by_length(r):
                    return cost(z[: a + 1] + [z[a] + r] + z[a + 2:])
                z[a + 1] = z[a] + _ternary(by_length, 0.0, D, tol / 10)
                continue
            if coupled and i == a:
                r0 = z[a + 1] - z[a]

                def by_start(t):
                    return cost(z[:a] + [t, t + r0] + z[a + 2:])
                t = _ternary(by_start, 0.0, D, tol / 10)
                z[a], z[a + 1] = t, t + r0
                continue

            def by_pos(t, i=i):
                return cost(z[:i] + [t] + z[i + 1:])
            z[i] = _ternary(by_pos, 0.0, D, tol / 10)
        now = cost(z)
        if best - now < tol / 10:
            best = min(best, now)
            break
        best = now
    moves = [z[i + 1] - z[i] for i in range(m) if segs[i] is not None]
    run = z[a + 1] - z[a] if has_run else 0.0
    return best, moves, max(run, 0.0)


def _route_path(route: _Route, p: SpacePoint, sign: float, moves, run: float, spec: ProductSpec) -> CurvePolyline:
    verts = [p]
    y = p.fiber
    pieces = route.before + route.after
    nb = len(route.before)
    for i, (_, x_end, _) in enumerate(pieces):
        if i == nb and run > 0:
            verts.extend(_run_vertices(route, verts[-1], sign * run, spec))
            y = verts[-1].fiber
        y = _fiber(y + sign * moves[i], spec)
        verts.append(SpacePoint(x_end, y))
    if nb == len(pieces) and run > 0:
        verts.extend(_run_vertices(route, verts[-1], sign * run, spec))
    return CurvePolyline(tuple(verts))


def _fiber(y: float, spec: ProductSpec) -> float:
    return spec.base.normalize(y) if spec.base.periodic else min(max(y, 0.0), spec.base.length)


def _run_vertices(route: _Route, at: SpacePoint, dy: float, spec: ProductSpec):
    y = _fiber(at.fiber + dy, spec)
    if route.run_x is None or route.run_x == at.x:
        return [SpacePoint(at.x, y)]
    return [SpacePoint(route.run_x, at.fiber), SpacePoint(route.run_x, y), SpacePoint(at.x, y)]


def _routes(profile: WarpProfile, p: SpacePoint, q: SpacePoint):
    if p.x != q.x:
        yield _Route("A", p.x, _oriented(profile, p.x, q.x), (), math.inf)
    turns = set(profile.breakpoints) | set(profile.overrides) | {p.x, q.x}
    for x in sorted(turns):
        c, attained = profile.run_cost(x)
        run_x = None
        if not attained:
            # approach the open strip end from the side where the cheap value lives
            k = profile.strip_index(x)
            side = 1.0 if profile.strip_values[k] == c and x < profile.t1 else -1.0
            run_x = x + side * EPS_OFFSET
        yield _Route(f"B@{x:.12g}", x, _oriented(profile, p.x, x), _oriented(profile, x, q.x), c, attained, run_x)


def distance_candidates(profile: WarpProfile, p, q, tol: float = DEFAULT_TOL, base: BaseSpec | None = None,
                        method: str = "dual") -> DistanceResult:
    """Shortest-route length between ``p`` and ``q`` over the candidate route classes."""
    if not (tol > 0 and math.isfinite(tol)):
        raise UsageError(f"tol must be positive, got {tol}")
    if method not in ("dual", "descent"):
        raise UsageError(f"unknown candidate method {method!r}")
    spec = _spec_for(profile, base)
    p = spec.check(p)
    q = spec.check(q)
    if p == q:
        return DistanceResult(0.0, CurvePolyline((p,)), "candidate", 0.0, False, "trivial")
    delta = spec.base.signed_delta(p.fiber, q.fiber)
    D = abs(delta)
    sign = 1.0 if delta >= 0 else -1.0

    line = generalized_line(p, q, spec)
    best = (polyline_length(profile, line, spec.base), line, 0, False, "C")
    for route in _routes(profile, p, q):
        if D == 0.0 and route.kind != "A":
            continue
        if method == "dual":
            value, moves, run = _solve_dual(route, D)
        else:
            value, moves, run = _solve_descent(route, D, tol)
        eps = (not route.attained) and run > 0
        nvars = len(route.before) + len(route.after) + (1 if math.isfinite(route.run_cost) else 0)
        cur, _, _, cur_eps, cur_kind = best
        better = value < cur * (1 - _TIE) - 1e-300
        tie = not better and value <= cur * (1 + _TIE)
        # ties go to attained routes, then to routes without a run
        if better or (tie and cur_eps and not eps):
            path = _route_path(route, p, sign, moves, run, spec)
            best = (value, path, nvars, eps, route.kind)
    value, path, nvars, eps, kind = best
    # pin the far endpoint against accumulated rounding
    verts = list(path.vertices)
    verts[-1] = q
    return DistanceResult(max(value, 0.0), CurvePolyline(tuple(verts)), "candidate",
                          tol * max(nvars, 1), eps, kind)


# ---------------------------------------------------------------------- grid

_FIRST_QUADRANT = ((1, 0), (2, 1), (1, 1), (1, 2), (0, 1))


def stencil_overhead(profile: WarpProfile) -> float:
    """Worst relative excess of a two-direction stencil path over a straight segment.

    In a strip of value ``v`` the metric is Euclidean in ``(x, v*y)``, which
    stretches the stencil's directions; the widest angular gap ``g`` over all
    strips gives the overhead ``sec(g/2) - 1``.
    """
    worst = 0.0
    for v in set(profile.strip_values):
        angles = [math.atan2(v * b, a) for a, b in _FIRST_QUADRANT]
        gap = max(b - a for a, b in zip(angles, angles[1:]))
        worst = max(worst, 1.0 / math.cos(gap / 2) - 1.0)
    return worst


def _lines(lo: float, hi: float, h: float, extras, periodic: bool, top_level: int):
    """Sorted lattice coordinates and their level memberships.

    Uniform line ``k`` belongs to level ``l`` when ``k`` is a multiple of
    ``2**l``; extra lines belong to every level.  Coordinates are computed as
    ``lo + k*h`` so halving ``h`` reproduces the coarser lattice exactly.
    """
    count = int(math.floor((hi - lo) / h * (1 + 1e-12)))
    uniform = [(lo + k * h, k) for k in range(count + 1)]
    if periodic:
        uniform = [(c, k) for c, k in uniform if c < hi]
    extras = sorted(set(float(e) for e in extras if lo <= e <= hi and not (periodic and e >= hi)))
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    coords = [(e, -1) for e in extras]
    for c, k in uniform:
        j = np.searchsorted(extras, c) if extras else 0
        near = any(abs(c - extras[m]) <= slack for m in (j - 1, j) if 0 <= m < len(extras))
        if not near:
            coords.append((c, k))
    coords.sort()
    xs = np.array([c for c, _ in coords])
    nlev = top_level + 1
    pos = np.full((nlev, len(coords)), -1, dtype=np.int64)
    lists = np.full((nlev, len(coords)), -1, dtype=np.int64)
    counts = np.zeros(nlev, dtype=np.int64)
    for lev in range(nlev):
        m = 1 << lev
        members = [i for i, (_, k) in enumerate(coords) if k < 0 or k % m == 0]
        counts[lev] = len(members)
        lists[lev, : len(members)] = members
        pos[lev, members] = np.arange(len(members))
    return xs, pos, lists, counts


def _levels(h: float, span: float) -> int:
    top = 0
    while h * (1 << (top + 1)) <= span / 8:
        top += 1
    return top


def distance_grid(profile: WarpProfile, p, q, h: float = DEFAULT_H, base: BaseSpec | None = None,
                  node_cap: int = DEFAULT_NODE_CAP) -> DistanceResult:
    """Lattice shortest path; an upper bound on the distance with an explicit error bound."""
    if not (h > 0 and math.isfinite(h)):
        raise UsageError(f"grid step must be positive, got {h}")
    spec = _spec_for(profile, base)
    p = spec.check(p)
    q = spec.check(q)
    L = spec.base.length
    periodic = spec.base.periodic
    est = (math.floor(spec.width / h) + 2 + len(profile.breakpoints) + len(profile.overrides)) * \
          (math.floor(L / h) + 3)
    if est > node_cap:
        raise ResourceError(f"grid with step {h} needs about {est} nodes, cap is {node_cap}")
    top = _levels(h, min(spec.width, L))
    xs, cpos, clist, ccount = _lines(spec.t0, spec.t1, h,
                                     list(profile.breakpoints) + list(profile.overrides) + [p.x, q.x],
                                     False, top)
    ys, rpos, rlist, rcount = _lines(0.0, L, h, [p.fiber, q.fiber] + ([] if periodic else [L]), periodic, top)
    gapv = np.array([profile.strip_values[profile.strip_index(0.5 * (a + b))] for a, b in zip(xs, xs[1:])])
    colv = np.array([profile.evaluate(x) for x in xs])
    nr = len(ys)
    ip, jp = int(np.searchsorted(xs, p.x)), int(np.searchsorted(ys, p.fiber))
    iq, jq = int(np.searchsorted(xs, q.x)), int(np.searchsorted(ys, q.fiber))
    corner1 = SpacePoint(q.x, p.fiber)
    corner2 = SpacePoint(p.x, q.fiber)
    limit = min(polyline_length(profile, CurvePolyline((p, corner1, q)), spec.base),
                polyline_length(profile, CurvePolyline((p, corner2, q)), spec.base))
    limit = limit * (1 + 1e-9) + 1e-300  # the lattice's own L-path may round slightly above

    value, nodes = kernels.grid_dijkstra(xs, ys, periodic, L, gapv, colv, cpos, clist, ccount,
                                         rpos, rlist, rcount, ip * nr + jp, iq * nr + jq, limit)
    if not math.isfinite(value):  # pragma: no cover - the L-shaped bound is always reachable
        raise RuntimeError("grid search failed to reach the target")
    verts = [SpacePoint(float(xs[n // nr]), float(ys[n % nr])) for n in nodes]
    verts[0], verts[-1] = p, q
    bound = stencil_overhead(profile) * value + 2 * h * profile.global_bounds()[1]
    return DistanceResult(float(value), CurvePolyline(tuple(verts)), "grid", bound, False, f"h={h:g}")


def metric_handle_from_profile(profile: WarpProfile, solver: str = "candidate", tol: float = DEFAULT_TOL,
                               h: float = DEFAULT_H, base: BaseSpec | None = None, method: str = "dual"):
    """Wrap a solver as a two-point metric for the analysis layer."""
    from .oracles import MetricHandle

    if solver == "candidate":
        def ev(p, q):
            return distance_candidates(profile, p, q, tol, base, method).value

        def measure(p, q):
            r = distance_candidates(profile, p, q, tol, base, method)
            return r.value, r.error_bound
        return MetricHandle(ev, profile.label or "profile", "solver_backed", 4 * tol, measure=measure,
                            spec=_spec_for(profile, base))
    if solver == "grid":
        def ev(p, q):
            return distance_grid(profile, p, q, h, base).value

        def measure(p, q):
            r = distance_grid(profile, p, q, h, base)
            return r.value, r.error_bound
        budget = stencil_overhead(profile) * 2 + 2 * h * profile.global_bounds()[1]
        return MetricHandle(ev, (profile.label or "profile") + "@grid", "solver_backed", budget,
                            measure=measure, spec=_spec_for(profile, base))
    raise UsageError(f"unknown solver {solver!r}; choose candidate or grid")
