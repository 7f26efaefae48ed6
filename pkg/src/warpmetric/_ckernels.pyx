# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels.  Same signatures and results as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot, INFINITY, isfinite
from libcpp.queue cimport priority_queue
from libcpp.pair cimport pair

cnp.import_array()

ctypedef long long node_t
ctypedef pair[double, node_t] entry_t

cdef int[16] _SA = [1, -1, 0, 0, 1, 1, -1, -1, 1, 1, -1, -1, 2, 2, -2, -2]
cdef int[16] _SB = [0, 0, 1, -1, 1, -1, 1, -1, 2, -2, 2, -2, 1, -1, 1, -1]


cdef inline double _slope(const double[::1] w, const double[::1] v, double D, double p) noexcept nogil:
    cdef Py_ssize_t k
    cdef double s = 0.0
    for k in range(w.shape[0]):
        s += w[k] * p / (v[k] * sqrt((v[k] - p) * (v[k] + p)))
    return D - s


def dual_optimum(widths, values, double D, double cap):
    """Maximize ``p*D + sum(w * sqrt(1 - (p/v)**2))`` over ``0 <= p <= min(cap, min(values))``.

    Returns ``(value, p_star)``.
    """
    cdef const double[::1] w = np.ascontiguousarray(widths, dtype=np.float64)
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0], k
    cdef double vmin, top, lo, hi, mid, p, total
    if n == 0:
        if not isfinite(cap):
            raise ValueError("a zero-width structure needs a finite run cost")
        return cap * D, cap
    with nogil:
        vmin = v[0]
        for k in range(1, n):
            if v[k] < vmin:
                vmin = v[k]
        top = cap if cap < vmin else vmin
        if D <= 0.0:
            p = 0.0
        elif top < vmin and _slope(w, v, D, top) >= 0.0:
            p = top
        else:
            lo = 0.0
            hi = top
            for k in range(200):
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                if _slope(w, v, D, mid) > 0.0:
                    lo = mid
                else:
                    hi = mid
            p = lo
        total = p * D
        for k in range(n):
            total += w[k] * sqrt((v[k] - p) * (v[k] + p)) / v[k]
    return total, p


cdef inline double _segment(const double[::1] xs, const double[::1] gapv, const double[::1] colv,
                            Py_ssize_t i, Py_ssize_t i2, double dy) noexcept nogil:
    cdef Py_ssize_t lo, hi, k, start
    cdef double dx, total, val
    if i == i2:
        return colv[i] * fabs(dy)
    if i < i2:
        lo = i
        hi = i2
    else:
        lo = i2
        hi = i
    dx = xs[hi] - xs[lo]
    total = 0.0
    k = lo
    while k < hi:
        val = gapv[k]
        start = k
        while k + 1 < hi and gapv[k + 1] == val:
            k += 1
        k += 1
        total += (xs[k] - xs[start]) / dx * hypot(dx, val * dy)
    return total


def grid_dijkstra(xs_in, ys_in, bint periodic, double L, gapv_in, colv_in,
                  cpos_in, clist_in, ccount_in, rpos_in, rlist_in, rcount_in,
                  long long src, long long dst, double limit):
    """Shortest path on the layered lattice with a multi-level 16-neighbour stencil.

    Returns ``(distance, node_path)``.
    """
    cdef const double[::1] xs = np.ascontiguousarray(xs_in, dtype=np.float64)
    cdef const double[::1] ys = np.ascontiguousarray(ys_in, dtype=np.float64)
    cdef const double[::1] gapv = np.ascontiguousarray(gapv_in, dtype=np.float64)
    cdef const double[::1] colv = np.ascontiguousarray(colv_in, dtype=np.float64)
    cdef const long long[:, ::1] cpos = np.ascontiguousarray(cpos_in, dtype=np.int64)
    cdef const long long[:, ::1] clist = np.ascontiguousarray(clist_in, dtype=np.int64)
    cdef const long long[::1] ccount = np.ascontiguousarray(ccount_in, dtype=np.int64)
    cdef const long long[:, ::1] rpos = np.ascontiguousarray(rpos_in, dtype=np.int64)
    cdef const long long[:, ::1] rlist = np.ascontiguousarray(rlist_in, dtype=np.int64)
    cdef const long long[::1] rcount = np.ascontiguousarray(rcount_in, dtype=np.int64)
    cdef Py_ssize_t nc = xs.shape[0], nr = ys.shape[0], nlev = ccount.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist_arr = np.full(nc * nr, np.inf)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pred_arr = np.full(nc * nr, -1, dtype=np.int64)
    cdef double[::1] dist = dist_arr
    cdef long long[::1] pred = pred_arr
    cdef priority_queue[entry_t] heap
    cdef entry_t top
    cdef double d, nd, dy
    cdef double cut = limit * (1 + 1e-12) + 1e-300
    cdef double best = INFINITY
    cdef long long u, v, i, j, i2, j2, ci, rj, c2, r2, lev, nc_l, nr_l
    cdef int s, a, b
    with nogil:
        dist[src] = 0.0
        heap.push(entry_t(-0.0, src))
        while not heap.empty():
            top = heap.top()
            heap.pop()
            d = -top.first
            u = top.second
            if d > dist[u]:
                continue
            if u == dst:
                best = d
                break
            i = u // nr
            j = u % nr
            for lev in range(nlev):
                ci = cpos[lev, i]
                rj = rpos[lev, j]
                if ci < 0 or rj < 0:
                    break
                nc_l = ccount[lev]
                nr_l = rcount[lev]
                for s in range(16):
                    a = _SA[s]
                    b = _SB[s]
                    c2 = ci + a
                    if c2 < 0 or c2 >= nc_l:
                        continue
                    r2 = rj + b
                    if periodic:
                        r2 = ((r2 % nr_l) + nr_l) % nr_l
                    elif r2 < 0 or r2 >= nr_l:
                        continue
                    i2 = clist[lev, c2]
                    j2 = rlist[lev, r2]
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
                    if nd < dist[v]:
                        dist[v] = nd
                        pred[v] = u
                        heap.push(entry_t(-nd, v))
    path = []
    if isfinite(best):
        node = dst
        while node != -1:
            path.append(node)
            node = pred_arr[node]
        path.reverse()
    return best, path
