"""Pure-Python kernels.  Same signatures and results as the compiled ``_ckernels``."""
from __future__ import annotations

import heapq
import math

import numpy as np

STENCIL = ((1, 0), (-1, 0), (0, 1), (0, -1),
           (1, 1), (1, -1), (-1, 1), (-1, -1),
           (1, 2), (1, -2), (-1, 2), (-1, -2),
           (2, 1), (2, -1), (-2, 1), (-2, -1))


def _slope(widths, values, D, p):
    """Derivative of the dual objective at ray parameter ``p``."""
    s = 0.0
    for w, v in zip(widths, values):
        s += w * p / (v * math.sqrt((v - p) * (v + p)))
    return D - s


def dual_optimum(widths, values, D, cap):
    """Maximize ``p*D + sum(w * sqrt(1 - (p/v)**2))`` over ``0 <= p <= min(cap, min(values))``.

    The maximum is the least cost of carrying a fiber displacement ``D`` through
    strips of the given widths and values, optionally helped by a fiber run of
    unit cost ``cap``.  Returns ``(value, p_star)``.
    """
    n = len(widths)
    if n == 0:
        if not math.isfinite(cap):
            raise ValueError("a zero-width structure needs a finite run cost")
        return cap * D, cap
    vmin = min(values)
    top = min(cap, vmin)
    if D <= 0.0:
        p = 0.0
    elif top < vmin and _slope(widths, values, D, top) >= 0.0:
        p = top
    else:
        lo, hi = 0.0, top
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _slope(widths, values, D, mid) > 0.0:
                lo = mid
            else:
                hi = mid
        p = lo
    total = p * D
    for w, v in zip(widths, values):
        total += w * math.sqrt((v - p) * (v + p)) / v
    return total, p


def _segment(xs, gapv, colv, i, i2, dy):
    if i == i2:
        return colv[i] * abs(dy)
    lo, hi = (i, i2) if i < i2 else (i2, i)
    dx = xs[hi] - xs[lo]
    total = 0.0
    k = lo
    while k < hi:
        v = gapv[k]
        start = k
        while k + 1 < hi and gapv[k + 1] == v:
            k += 1
        k += 1
        total += (xs[k] - xs[start]) / dx * math.hypot(dx, v * dy)
    return total


def grid_dijkstra(xs, ys, periodic, L, gapv, colv, cpos, clist, ccount, rpos, rlist, rcount,
                  src, dst, limit):
    """Shortest path on the layered lattice with a multi-level 16-neighbour stencil.

    Nodes are ``i * len(ys) + j``.  Level ``l`` connects only nodes whose column
    and row both belong to level ``l`` (``cpos[l, i] >= 0`` etc.), using stencil
    offsets measured in that level's own index space.  Returns
    ``(distance, node_path)``; the distance is inf and the path empty when
    ``dst`` is not reached within ``limit``.
    """
    xs = [float(x) for x in xs]
    ys = [float(y) for y in ys]
    gapv = [float(v) for v in gapv]
    colv = [float(v) for v in colv]
    cpos = np.asarray(cpos).tolist()
    clist = np.asarray(clist).tolist()
    rpos = np.asarray(rpos).tolist()
    rlist = np.asarray(rlist).tolist()
    ccount = [int(c) for c in ccount]
    rcount = [int(c) for c in rcount]
    nlev = len(ccount)
    nr = len(ys)
    dist = {src: 0.0}
    pred = {src: -1}
    heap = [(0.0, src)]
    cut = limit * (1 + 1e-12) + 1e-300
    best = math.inf
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if u == dst:
            best = d
            break
        i, j = divmod(u, nr)
        for lev in range(nlev):
            ci = cpos[lev][i]
            rj = rpos[lev][j]
            if ci < 0 or rj < 0:
                break
            nc_l = ccount[lev]
            nr_l = rcount[lev]
            for a, b in STENCIL:
                c2 = ci + a
                if c2 < 0 or c2 >= nc_l:
                    continue
                r2 = rj + b
                if periodic:
                    r2 %= nr_l
                elif r2 < 0 or r2 >= nr_l:
                    continue
                i2 = clist[lev][c2]
                j2 = rlist[lev][r2]
                dy = ys[j2] - ys[j]
                if periodic:
                    if b > 0 and dy <= 0.0:
                        dy += L
                    elif b < 0 and dy >= 0.0:
                        dy -= L
                nd = d + _segment(xs, gapv, colv, i, i2, dy)
                if nd > cut:
                    continue
                v = i2 * nr + j2
                if nd < dist.get(v, math.inf):
                    dist[v] = nd
                    pred[v] = u
                    heapq.heappush(heap, (nd, v))
    path = []
    if math.isfinite(best):
        node = dst
        while node != -1:
            path.append(node)
            node = pred[node]
        path.reverse()
    return best, path
