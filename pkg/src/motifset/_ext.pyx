# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner-loop kernels.

Twins of the pure NumPy implementations in ``motifset._purepy``: same
function names, same argument conventions, same results up to float
rounding.  The dispatcher in ``motifset._kernels`` prefers this module and
falls back to the pure one when the build is unavailable.

Numerical conventions shared with the pure backend:

* running sums are Kahan-compensated and re-anchored by a direct pass every
  few thousand steps, so drift stays far below the 1e-6 distance tolerance;
* squared distances are clamped to [0, 4l];
* flat windows compare as all-zero vectors (0 to each other, l squared to
  any non-flat window).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt

cnp.import_array()

BACKEND = "ext"

# Re-anchor cadence for the rolling accumulators.  Kept equal to the pure
# backend so both stay within the same error budget.
STATS_REFRESH = 4096
DOT_BLOCK = 1024

cdef Py_ssize_t _STATS_REFRESH = 4096
cdef Py_ssize_t _DOT_REFRESH = 1024

# Recursion in exact_dfs keeps per-frame scratch on the C stack; this caps
# the supported subset size.  The driver routes larger k (never reachable in
# practice before the subset ceiling trips) to the pure backend.
MAX_EXACT_K = 32
cdef Py_ssize_t _MAX_EXACT_K = 32


def sliding_stats_kernel(double[::1] values, Py_ssize_t l):
    """Mean and population std of every length-l window, single pass."""
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t m = n - l + 1
    means_arr = np.empty(m, dtype=np.float64)
    stds_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] means = means_arr
    cdef double[::1] stds = stds_arr
    cdef double s = 0.0, cs = 0.0, q = 0.0, cq = 0.0
    cdef double y, t2, v, mu, var
    cdef double inv = 1.0 / <double> l
    cdef Py_ssize_t i, t

    for t in range(l):
        v = values[t]
        y = v - cs
        t2 = s + y
        cs = (t2 - s) - y
        s = t2
        y = v * v - cq
        t2 = q + y
        cq = (t2 - q) - y
        q = t2

    for i in range(m):
        if i != 0 and i % _STATS_REFRESH == 0:
            s = 0.0
            cs = 0.0
            q = 0.0
            cq = 0.0
            for t in range(i, i + l):
                v = values[t]
                y = v - cs
                t2 = s + y
                cs = (t2 - s) - y
                s = t2
                y = v * v - cq
                t2 = q + y
                cq = (t2 - q) - y
                q = t2
        mu = s * inv
        var = q * inv - mu * mu
        means[i] = mu
        stds[i] = sqrt(var) if var > 0.0 else 0.0
        if i + 1 < m:
            v = values[i + l]
            y = (v - values[i]) - cs
            t2 = s + y
            cs = (t2 - s) - y
            s = t2
            y = (v * v - values[i] * values[i]) - cq
            t2 = q + y
            cq = (t2 - q) - y
            q = t2

    return means_arr, stds_arr


def build_matrix_sq(double[::1] values, Py_ssize_t l, double[::1] means,
                    double[::1] stds, cnp.uint8_t[::1] flat):
    """Full squared-distance matrix via per-diagonal rolling dot products.

    O(n^2) independent of l: along each diagonal s the window dot product
    rolls by one add and one subtract, re-anchored with a direct dot every
    DOT_BLOCK steps.
    """
    cdef Py_ssize_t m = means.shape[0]
    out_arr = np.zeros((m, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double dl = <double> l
    cdef double four_l = 4.0 * dl
    cdef double y, t2, d, denom
    cdef double[8] q, cq
    cdef Py_ssize_t s0, g, gmax, s, t, u
    cdef Py_ssize_t i0, j0, i1, j1, i, j
    cdef Py_ssize_t tile = 256

    # Diagonals are rolled in groups of eight.  One diagonal alone writes a
    # fresh cache line per cell (stride m + 1); eight at a time fill the
    # line before it is evicted, so the write traffic stays at one store
    # per cell no matter how large the matrix grows.
    for s0 in range(1, m, 8):
        gmax = 8 if s0 + 8 <= m else m - s0
        for g in range(gmax):
            q[g] = 0.0
            cq[g] = 0.0
            for u in range(l):
                q[g] += values[u] * values[s0 + g + u]
        for t in range(m - s0):
            if t != 0:
                if t % _DOT_REFRESH == 0:
                    for g in range(gmax):
                        if t < m - (s0 + g):
                            q[g] = 0.0
                            cq[g] = 0.0
                            for u in range(t, t + l):
                                q[g] += values[u] * values[s0 + g + u]
                else:
                    for g in range(gmax):
                        s = s0 + g
                        if t < m - s:
                            y = (values[t + l - 1] * values[s + t + l - 1]
                                 - values[t - 1] * values[s + t - 1]) - cq[g]
                            t2 = q[g] + y
                            cq[g] = (t2 - q[g]) - y
                            q[g] = t2
            for g in range(gmax):
                s = s0 + g
                if t >= m - s:
                    break
                if flat[t]:
                    d = 0.0 if flat[s + t] else dl
                elif flat[s + t]:
                    d = dl
                else:
                    denom = dl * stds[t] * stds[s + t]
                    d = 2.0 * dl * (1.0 - (q[g] - dl * means[t] * means[s + t]) / denom)
                    if d < 0.0:
                        d = 0.0
                    elif d > four_l:
                        d = four_l
                out[t, s + t] = d

    # Mirror the upper triangle tile by tile.  Writing both halves inside
    # the diagonal loop costs a far page fault per element once the matrix
    # outgrows the TLB; a blocked copy keeps the write window resident.
    for i0 in range(0, m, tile):
        i1 = i0 + tile
        if i1 > m:
            i1 = m
        for j0 in range(i0, m, tile):
            j1 = j0 + tile
            if j1 > m:
                j1 = m
            for i in range(i0, i1):
                j = j0 if j0 > i else i + 1
                while j < j1:
                    out[j, i] = out[i, j]
                    j += 1

    return out_arr


def knn_greedy_sq(double[::1] row_sq, Py_ssize_t query, Py_ssize_t gap,
                  Py_ssize_t k, double bound_sq):
    """Greedy non-overlapping nearest neighbors of one query offset.

    Repeatedly takes the closest still-admissible offset (ties resolve to the
    smaller offset), masking each admission's overlap zone.  Stops when k
    offsets are collected or the next-closest distance is not strictly below
    bound_sq.  Returns admission order, query first.
    """
    cdef Py_ssize_t n = row_sq.shape[0]
    work_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] work = work_arr
    sel_arr = np.empty(k, dtype=np.int64)
    cdef cnp.int64_t[::1] sel = sel_arr
    cdef Py_ssize_t count, j, lo, hi, arg
    cdef double mn

    for j in range(n):
        work[j] = row_sq[j]
    sel[0] = query
    count = 1
    lo = query - gap
    if lo < 0:
        lo = 0
    hi = query + gap + 1
    if hi > n:
        hi = n
    for j in range(lo, hi):
        work[j] = INFINITY

    while count < k:
        arg = 0
        mn = work[0]
        for j in range(1, n):
            if work[j] < mn:
                mn = work[j]
                arg = j
        if not mn < bound_sq:
            break
        sel[count] = arg
        count += 1
        lo = arg - gap
        if lo < 0:
            lo = 0
        hi = arg + gap + 1
        if hi > n:
            hi = n
        for j in range(lo, hi):
            work[j] = INFINITY

    return sel_arr[:count]


def extent_sq_lookup(double[:, ::1] matrix_sq, cnp.int64_t[::1] offsets,
                     double bound_sq, bint inclusive):
    """Max pairwise squared distance, abandoning early against a bound.

    Strict mode (inclusive=False) abandons as soon as a pair reaches the
    bound; inclusive mode only when it exceeds it.  Abandonment returns inf.
    """
    cdef Py_ssize_t n = offsets.shape[0]
    cdef Py_ssize_t a, b
    cdef double best = 0.0, d

    for a in range(n):
        for b in range(a + 1, n):
            d = matrix_sq[offsets[a], offsets[b]]
            if d > best:
                if inclusive:
                    if d > bound_sq:
                        return INFINITY
                elif d >= bound_sq:
                    return INFINITY
                best = d
    return best


def approx_scan(double[:, ::1] matrix_sq, Py_ssize_t gap, Py_ssize_t k,
                double d0_sq, seed_offsets):
    """One greedy candidate set per query offset, keeping the best extent.

    Query offsets are visited in ascending order.  A query is expanded only
    if at least k offsets (the query itself included) lie strictly below the
    incumbent extent; its candidate set is the greedy nearest-neighbor
    selection, and the set's extent is evaluated with early abandoning.
    Strict improvements replace the incumbent.

    Returns (best_offsets_or_None, extent_sq, examined, pruned).
    """
    cdef Py_ssize_t n = matrix_sq.shape[0]
    cdef double d_sq = d0_sq
    best_arr = None
    if seed_offsets is not None:
        best_arr = np.array(seed_offsets, dtype=np.int64)

    work_arr = np.empty(n, dtype=np.float64)
    sel_arr = np.empty(k, dtype=np.int64)
    cdef double[::1] work = work_arr
    cdef cnp.int64_t[::1] sel = sel_arr
    cdef Py_ssize_t i, j, cnt, count, lo, hi, arg, a, b
    cdef long examined = 0, pruned = 0
    cdef double mn, ext, d
    cdef bint abandoned

    for i in range(n):
        cnt = 0
        for j in range(n):
            if matrix_sq[i, j] < d_sq:
                cnt += 1
        if cnt < k:
            continue

        for j in range(n):
            work[j] = matrix_sq[i, j]
        sel[0] = i
        count = 1
        lo = i - gap
        if lo < 0:
            lo = 0
        hi = i + gap + 1
        if hi > n:
            hi = n
        for j in range(lo, hi):
            work[j] = INFINITY
        while count < k:
            arg = 0
            mn = work[0]
            for j in range(1, n):
                if work[j] < mn:
                    mn = work[j]
                    arg = j
            if not mn < d_sq:
                break
            sel[count] = arg
            count += 1
            lo = arg - gap
            if lo < 0:
                lo = 0
            hi = arg + gap + 1
            if hi > n:
                hi = n
            for j in range(lo, hi):
                work[j] = INFINITY
        if count < k:
            continue

        examined += 1
        ext = 0.0
        abandoned = 0
        for a in range(k):
            for b in range(a + 1, k):
                d = matrix_sq[sel[a], sel[b]]
                if d > ext:
                    if d >= d_sq:
                        abandoned = 1
                        break
                    ext = d
            if abandoned:
                break
        if abandoned:
            pruned += 1
            continue
        if ext < d_sq:
            d_sq = ext
            best_arr = np.sort(sel_arr[:k].copy())

    return best_arr, d_sq, examined, pruned


cdef void _sort_k(cnp.int64_t* arr, Py_ssize_t k) noexcept:
    cdef Py_ssize_t a, b
    cdef cnp.int64_t key
    for a in range(1, k):
        key = arr[a]
        b = a - 1
        while b >= 0 and arr[b] > key:
            arr[b + 1] = arr[b]
            b -= 1
        arr[b + 1] = key


cdef bint _lex_less(cnp.int64_t* a, cnp.int64_t* b, Py_ssize_t k) noexcept:
    cdef Py_ssize_t t
    for t in range(k):
        if a[t] != b[t]:
            return a[t] < b[t]
    return 0


cdef double _dfs(double[:, ::1] M, cnp.int64_t* members, Py_ssize_t n_members,
                 cnp.int64_t[::1] cand, Py_ssize_t start, Py_ssize_t remaining,
                 Py_ssize_t limit, double cur_max, Py_ssize_t gap, double d_sq,
                 cnp.int64_t* best, bint* has_best, long* examined,
                 long* pruned, Py_ssize_t k) noexcept:
    cdef Py_ssize_t p, t
    cdef cnp.int64_t o, other, diff
    cdef double new_max, d
    cdef bint ok
    cdef cnp.int64_t tmp_sorted[32]

    if remaining == 0:
        examined[0] += 1
        for t in range(k):
            tmp_sorted[t] = members[t]
        _sort_k(tmp_sorted, k)
        if cur_max < d_sq or (cur_max == d_sq
                              and (not has_best[0]
                                   or _lex_less(tmp_sorted, best, k))):
            d_sq = cur_max
            for t in range(k):
                best[t] = tmp_sorted[t]
            has_best[0] = 1
        return d_sq

    for p in range(start, limit - remaining + 1):
        o = cand[p]
        new_max = cur_max
        ok = 1
        for t in range(n_members):
            other = members[t]
            diff = o - other if o > other else other - o
            if diff <= gap:
                ok = 0
                break
            d = M[o, other]
            if d > new_max:
                new_max = d
        if not ok:
            continue
        if new_max > d_sq:
            pruned[0] += 1
            continue
        members[n_members] = o
        d_sq = _dfs(M, members, n_members + 1, cand, p + 1, remaining - 1,
                    limit, new_max, gap, d_sq, best, has_best, examined,
                    pruned, k)
    return d_sq


def exact_dfs(double[:, ::1] matrix_sq, Py_ssize_t query,
              cnp.int64_t[::1] cand, Py_ssize_t k, Py_ssize_t gap,
              double d_sq, best_offsets):
    """Exhaust all k-subsets containing `query` drawn from `cand`.

    `cand` must be sorted by (distance-to-query, offset) ascending and hold
    only offsets above the query that clear its overlap zone.  Each subset is
    bounded by its farthest-from-query member: once that member's distance
    exceeds the incumbent, no later anchor can improve and the loop breaks.
    Branches prune as soon as their running max exceeds the incumbent; equal
    extents resolve to the lexicographically smaller sorted offset tuple.

    Returns (extent_sq, best_offsets_or_None, examined, pruned).
    """
    cdef cnp.int64_t members[32]
    cdef cnp.int64_t best[32]
    cdef bint has_best = 0
    cdef long examined = 0, pruned = 0
    cdef Py_ssize_t m = cand.shape[0]
    cdef Py_ssize_t need = k - 1
    cdef Py_ssize_t last_pos, t
    cdef double d_far

    if k > _MAX_EXACT_K:
        raise ValueError(f"subset size {k} exceeds the compiled limit {_MAX_EXACT_K}")
    if best_offsets is not None:
        bo = np.ascontiguousarray(best_offsets, dtype=np.int64)
        for t in range(k):
            best[t] = bo[t]
        has_best = 1

    members[0] = query
    if m >= need:
        for last_pos in range(need - 1, m):
            d_far = matrix_sq[query, cand[last_pos]]
            if d_far > d_sq:
                pruned += 1
                break
            members[1] = cand[last_pos]
            d_sq = _dfs(matrix_sq, members, 2, cand, 0, need - 1, last_pos,
                        d_far, gap, d_sq, best, &has_best, &examined,
                        &pruned, k)

    out = None
    if has_best:
        out_arr = np.empty(k, dtype=np.int64)
        for t in range(k):
            out_arr[t] = best[t]
        out = out_arr
    return d_sq, out, examined, pruned
