"""Pure NumPy/Python kernels.

Fallback twins of the compiled kernels in ``motifset._ext``: same function
names, same argument conventions, same results up to float rounding (the two
backends may order additions differently inside the distance identity, but
each independently satisfies the 1e-6 agreement contract with the direct
per-pair evaluation).  Distances are squared throughout; square roots are
taken at reporting boundaries only.
"""

import math

import numpy as np

BACKEND = "python"

# Rolling statistics are re-anchored from scratch this often so rounding
# drift cannot accumulate along long series.
STATS_REFRESH = 4096

# Sliding dot products along each diagonal restart their local cumulative sum
# this often, for the same reason.
DOT_BLOCK = 1024


def sliding_stats_kernel(values, l):
    """Means and population stds of every length-l window, one pass.

    Kahan-compensated running sums with periodic re-anchoring; matches a
    two-pass evaluation to ~1e-9 relative at double precision.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    m = n - l + 1
    means = np.empty(m)
    stds = np.empty(m)
    s = c_s = 0.0
    q = c_q = 0.0
    for t in range(l):
        v = values[t]
        y = v - c_s
        tmp = s + y
        c_s = (tmp - s) - y
        s = tmp
        y = v * v - c_q
        tmp = q + y
        c_q = (tmp - q) - y
        q = tmp
    inv = 1.0 / l
    for i in range(m):
        if i and i % STATS_REFRESH == 0:
            w = values[i : i + l]
            s = math.fsum(w)
            q = math.fsum(v * v for v in w)
            c_s = c_q = 0.0
        mu = s * inv
        var = q * inv - mu * mu
        means[i] = mu
        stds[i] = math.sqrt(var) if var > 0.0 else 0.0
        if i + 1 < m:
            gained = values[i + l]
            lost = values[i]
            y = (gained - lost) - c_s
            tmp = s + y
            c_s = (tmp - s) - y
            s = tmp
            y = (gained * gained - lost * lost) - c_q
            tmp = q + y
            c_q = (tmp - q) - y
            q = tmp
    return means, stds


def _window_sums(p, l, count):
    """Sliding length-l sums of p for the first `count` start positions.

    Cumulative sums restart every DOT_BLOCK positions so rounding stays
    local to a block instead of growing with the diagonal length.
    """
    out = np.empty(count)
    for t0 in range(0, count, DOT_BLOCK):
        t1 = min(t0 + DOT_BLOCK, count)
        seg = p[t0 : t1 - 1 + l]
        c = np.empty(seg.size + 1)
        c[0] = 0.0
        np.cumsum(seg, out=c[1:])
        out[t0:t1] = c[l : l + (t1 - t0)] - c[: t1 - t0]
    return out


def build_matrix_sq(values, l, means, stds, flat):
    """Full squared z-normalized distance matrix by diagonal streaming.

    One sliding dot-product sweep per diagonal keeps the cost O(n^2)
    independent of l.  Flat windows: flat-vs-flat is 0, flat-vs-normal is l.
    Values are clamped to [0, 4l]; the diagonal is exactly 0.
    """
    values = np.asarray(values, dtype=np.float64)
    m = means.size
    out = np.zeros((m, m))
    flat = flat.astype(bool)
    any_flat = bool(flat.any())
    rows = np.arange(m)
    four_l = 4.0 * l
    for s in range(1, m):
        cnt = m - s
        p = values[: values.size - s] * values[s:]
        q = _window_sums(p, l, cnt)
        mu_a = means[:cnt]
        mu_b = means[s : s + cnt]
        denom = l * stds[:cnt] * stds[s : s + cnt]
        with np.errstate(divide="ignore", invalid="ignore"):
            d = 2.0 * l * (1.0 - (q - l * mu_a * mu_b) / denom)
        if any_flat:
            fa = flat[:cnt]
            fb = flat[s : s + cnt]
            d = np.where(fa & fb, 0.0, d)
            d = np.where(fa ^ fb, float(l), d)
        np.clip(d, 0.0, four_l, out=d)
        r = rows[:cnt]
        out[r, r + s] = d
        out[r + s, r] = d
    return out


def knn_greedy_sq(row_sq, query, gap, k, bound_sq):
    """Greedy nearest neighbors of `query` with trivial-match exclusion.

    The query is always first; afterwards offsets are admitted in ascending
    distance (ties toward the smaller offset, via first-minimum argmin),
    skipping anything within `gap` of an admitted offset, while strictly
    inside the bound.  Returns up to k offsets in admission order.
    """
    n = row_sq.size
    work = np.array(row_sq, dtype=np.float64, copy=True)
    selected = [query]
    work[max(0, query - gap) : query + gap + 1] = np.inf
    while len(selected) < k:
        j = int(np.argmin(work))
        if not work[j] < bound_sq:
            break
        selected.append(j)
        work[max(0, j - gap) : j + gap + 1] = np.inf
    return np.asarray(selected, dtype=np.int64)


def extent_sq_lookup(matrix_sq, offsets, bound_sq, inclusive):
    """Max pairwise squared distance with early abandoning.

    Strict mode (inclusive=False) abandons as soon as any pair reaches the
    bound; inclusive mode abandons only above it.  Returns inf on abandon.
    """
    best = 0.0
    n = len(offsets)
    for a in range(n):
        oa = offsets[a]
        for b in range(a + 1, n):
            d = matrix_sq[oa, offsets[b]]
            if d > best:
                if inclusive:
                    if d > bound_sq:
                        return math.inf
                elif d >= bound_sq:
                    return math.inf
                best = d
    return best


def approx_scan(matrix_sq, gap, k, d0_sq, seed_offsets):
    """Greedy candidate scan over all query offsets, ascending.

    For each query: count offsets strictly inside the best-so-far bound,
    skip if fewer than k, otherwise take the greedy non-overlapping kNN
    candidate and evaluate its extent with early abandoning; keep it on
    strict improvement.  Returns (offsets | None, d_sq, examined, pruned).
    """
    n = matrix_sq.shape[0]
    d_sq = d0_sq
    best = None if seed_offsets is None else np.array(seed_offsets, dtype=np.int64)
    examined = 0
    pruned = 0
    for i in range(n):
        row = matrix_sq[i]
        if np.count_nonzero(row < d_sq) < k:
            continue
        cand = knn_greedy_sq(row, i, gap, k, d_sq)
        if cand.size < k:
            continue
        examined += 1
        ext = extent_sq_lookup(matrix_sq, cand, d_sq, inclusive=False)
        if ext == math.inf:
            pruned += 1
            continue
        if ext < d_sq:
            d_sq = ext
            best = np.sort(cand)
    return best, d_sq, examined, pruned


def exact_dfs(matrix_sq, query, cand, k, gap, d_sq, best_offsets):
    """Exhaust all k-subsets {query} ∪ (k-1 of cand) no worse than the bound.

    `cand` holds offsets greater than the query, non-overlapping with it,
    sorted by (distance to query, offset).  Subsets are visited in ascending
    order of their farthest-from-query member, which makes the break on that
    member's distance admissible (the query is in every subset, so the extent
    is at least that pair).  Branches whose running max exceeds the bound are
    cut: supersets only grow the extent.  The incumbent updates on
    (extent, offset tuple) lexicographic order so exact ties resolve toward
    the earliest offsets.

    Returns (d_sq, best_offsets, examined, pruned).
    """
    m = cand.size
    need = k - 1
    examined = 0
    pruned = 0
    best = None if best_offsets is None else tuple(int(x) for x in best_offsets)
    if m < need:
        return d_sq, best_offsets, examined, pruned
    members = [query]

    def rec(start, remaining, limit, cur_max):
        nonlocal d_sq, best, examined, pruned
        if remaining == 0:
            examined += 1
            tup = tuple(sorted(members))
            if cur_max < d_sq or (cur_max == d_sq and (best is None or tup < best)):
                d_sq = cur_max
                best = tup
            return
        for p in range(start, limit - remaining + 1):
            o = int(cand[p])
            new_max = cur_max
            ok = True
            for other in members:
                if abs(o - other) <= gap:
                    ok = False
                    break
                d = matrix_sq[o, other]
                if d > new_max:
                    new_max = d
            if not ok:
                continue
            if new_max > d_sq:
                pruned += 1
                continue
            members.append(o)
            rec(p + 1, remaining - 1, limit, new_max)
            members.pop()

    for last_pos in range(need - 1, m):
        far = int(cand[last_pos])
        d_far = float(matrix_sq[query, far])
        if d_far > d_sq:
            pruned += 1
            break
        members.append(far)
        rec(0, need - 1, last_pos, d_far)
        members.pop()
    if best is None:
        return d_sq, best_offsets, examined, pruned
    return d_sq, np.asarray(best, dtype=np.int64), examined, pruned
