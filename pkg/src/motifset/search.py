"""Motif-set search: approximate scan, exact enumeration, oracle verification.

A motif set of size k is a set of k mutually non-overlapping window offsets;
its extent is the largest pairwise distance inside the set.  The searched
object is the k-set of minimal extent.  Ties between equal-extent sets
resolve to the lexicographically smallest sorted offset tuple, which keeps
results reproducible across runs and backends.

Three entry points, in increasing cost:

approx_k_motiflet
    One greedy candidate set per query offset, O(k n^2) worst case.  Its
    extent is at most twice the optimum (the greedy set lives inside a ball
    of the incumbent radius around the query).
exact_k_motiflet
    Seeds with the approximate result, then exhausts every k-subset whose
    members all lie within the incumbent extent of a common query, with
    branch-and-bound pruning.  Refuses up front when the pruning-free subset
    count estimate exceeds a ceiling.
oracle_k_motiflet
    Independent threshold-sweep verification for small instances: grows a
    graph edge by edge in distance order and reports the first distance
    level at which a k-clique appears.  Used to cross-check the exact
    search; exhaustive over distance levels rather than subsets.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .distances import as_source
from .errors import (CandidateOverlapError, FeasibilityError, ParameterError,
                     ResourceLimitError)

APPROXIMATE = "approximate"
EXACT = "exact"
ORACLE = "oracle"

DEFAULT_SUBSET_CEILING = 1_000_000_000

ORACLE_MAX_ITEMS = 1000
ORACLE_MAX_K = 6


@dataclass(frozen=True)
class Motiflet:
    """A motif set: sorted offsets, extent, and how it was obtained."""

    offsets: tuple
    extent: float
    k: int
    l: object
    exactness: str


@dataclass(frozen=True)
class SearchState:
    """Search diagnostics: work performed and the incumbent trajectory."""

    queries: int
    examined: int
    pruned: int
    initial_extent: float
    final_extent: float


def _validated_k(source, k):
    if not isinstance(k, (int, np.integer)):
        raise ParameterError(f"k must be an integer, got {k!r}")
    k = int(k)
    if k < 2:
        raise ParameterError(f"k must be at least 2, got {k}")
    cap = source.capacity()
    if cap < k:
        raise FeasibilityError(
            f"only {cap} mutually non-overlapping offsets exist, cannot form a set of {k}"
        )
    return k


def _validated_candidate(source, offsets, k):
    arr = np.asarray(list(offsets), dtype=np.int64)
    if arr.size != k:
        raise ParameterError(
            f"initial candidate holds {arr.size} offsets, expected {k}"
        )
    for o in arr:
        if not 0 <= o < source.n:
            raise ParameterError(f"candidate offset {int(o)} outside [0, {source.n})")
    arr = np.sort(arr)
    for a in range(k):
        for b in range(a + 1, k):
            if source.overlap(int(arr[a]), int(arr[b])):
                raise CandidateOverlapError(
                    f"candidate offsets {int(arr[a])} and {int(arr[b])} overlap"
                )
    return arr


def _extent_sq_source(source, offsets, bound_sq, inclusive):
    """Squared extent with early abandoning; inf when the bound is tripped."""
    if source.matrix_sq is not None:
        return float(_kernels.extent_sq_lookup(
            source.matrix_sq,
            np.ascontiguousarray(offsets, dtype=np.int64),
            float(bound_sq), bool(inclusive),
        ))
    off = [int(o) for o in offsets]
    best = 0.0
    for a in range(len(off)):
        for b in range(a + 1, len(off)):
            d = source.pair_sq(off[a], off[b])
            if d > best:
                if inclusive:
                    if d > bound_sq:
                        return math.inf
                elif d >= bound_sq:
                    return math.inf
                best = d
    return best


def _packed_offsets(source, k):
    """First k offsets of the greedy ascending packing (capacity >= k)."""
    if source.gap is not None:
        return np.arange(k, dtype=np.int64) * (source.gap + 1)
    chosen = []
    for i in range(source.n):
        if all(not source.predicate(c, i) for c in chosen):
            chosen.append(i)
            if len(chosen) == k:
                break
    return np.asarray(chosen, dtype=np.int64)


def _approx_core(source, k, seed_offsets=None, seed_d_sq=None):
    """Greedy scan; returns (sorted offsets, extent_sq, examined, pruned)."""
    from .distances import greedy_knn

    d0 = math.inf if seed_d_sq is None else float(seed_d_sq)
    seed = None if seed_offsets is None else np.ascontiguousarray(seed_offsets, dtype=np.int64)

    if source.matrix_sq is not None and source.gap is not None:
        best, d_sq, examined, pruned = _kernels.approx_scan(
            source.matrix_sq, source.gap, k, d0, seed)
    else:
        best, d_sq, examined, pruned = seed, d0, 0, 0
        for i in range(source.n):
            row = source.row_sq(i)
            if np.count_nonzero(row < d_sq) < k:
                continue
            sel = greedy_knn(source, i, k, d_sq, row=row)
            if sel.size < k:
                continue
            examined += 1
            ext = _extent_sq_source(source, sel, d_sq, inclusive=False)
            if ext == math.inf:
                pruned += 1
                continue
            if ext < d_sq:
                d_sq = ext
                best = np.sort(sel)

    if best is None:
        best = _packed_offsets(source, k)
        d_sq = _extent_sq_source(source, best, math.inf, inclusive=False)
    return np.sort(np.asarray(best, dtype=np.int64)), float(d_sq), int(examined), int(pruned)


def approx_k_motiflet(source_or_view, k, *, initial_candidate=None):
    """Greedy approximate search for the minimal-extent k-set.

    Visits query offsets in ascending order; a query is expanded only when
    at least k offsets lie strictly inside the incumbent extent, and its
    greedy nearest-neighbor set replaces the incumbent only on strict
    improvement.  The returned extent is at most twice the optimum.

    Parameters
    ----------
    source_or_view : SeriesView or DistanceSource
    k : int
        Set size, >= 2 and at most the source capacity.
    initial_candidate : iterable of int, optional
        k non-overlapping offsets whose extent seeds the incumbent bound.

    Returns
    -------
    (Motiflet, SearchState)
    """
    source = as_source(source_or_view)
    k = _validated_k(source, k)
    seed = seed_d = None
    if initial_candidate is not None:
        seed = _validated_candidate(source, initial_candidate, k)
        seed_d = _extent_sq_source(source, seed, math.inf, inclusive=False)
    best, d_sq, examined, pruned = _approx_core(source, k, seed, seed_d)
    motiflet = Motiflet(
        offsets=tuple(int(x) for x in best),
        extent=float(math.sqrt(d_sq)),
        k=k, l=source.l, exactness=APPROXIMATE,
    )
    state = SearchState(
        queries=source.n, examined=examined, pruned=pruned,
        initial_extent=math.inf if seed_d is None else math.sqrt(seed_d),
        final_extent=motiflet.extent,
    )
    return motiflet, state


def estimate_subsets(source, d_sq, k):
    """Pruning-free subset count: sum over queries of C(|ball| - 1, k - 1)."""
    total = 0
    for i in range(source.n):
        row = source.row_sq(i)
        r = int(np.count_nonzero(row <= d_sq)) - 1
        if r >= k - 1:
            total += math.comb(r, k - 1)
    return total


def _exact_dfs_py(source, query, cand, cand_d, k, d_sq, best, qrow):
    """Generic-source twin of the compiled subset enumeration."""
    best_t = None if best is None else tuple(int(v) for v in best)
    examined = pruned = 0
    members = [int(query)]
    need = k - 1
    m = len(cand)
    d_sq = float(d_sq)

    def rec(start, remaining, limit, cur_max):
        nonlocal d_sq, best_t, examined, pruned
        if remaining == 0:
            examined += 1
            tup = tuple(sorted(members))
            if cur_max < d_sq or (cur_max == d_sq
                                  and (best_t is None or tup < best_t)):
                d_sq = cur_max
                best_t = tup
            return
        for p in range(start, limit - remaining + 1):
            o = cand[p]
            new_max = cur_max
            ok = True
            for idx, other in enumerate(members):
                if source.overlap(o, other):
                    ok = False
                    break
                d = qrow[o] if idx == 0 else source.pair_sq(o, other)
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

    if m >= need:
        for last_pos in range(need - 1, m):
            d_far = cand_d[last_pos]
            if d_far > d_sq:
                pruned += 1
                break
            members.append(cand[last_pos])
            rec(0, need - 1, last_pos, d_far)
            members.pop()
    return d_sq, best_t, examined, pruned


def exact_k_motiflet(source_or_view, k, *, initial_candidate=None,
                     subset_ceiling=DEFAULT_SUBSET_CEILING):
    """Exhaustive search for the minimal-extent k-set.

    Runs the approximate scan first, then enumerates each candidate subset
    exactly once at its smallest member: per query offset, the admissible
    partners (above the query, outside its overlap zone, within the
    incumbent extent) are ordered by distance to the query, and subsets are
    expanded depth-first under their farthest-from-query member, pruning any
    branch whose running extent exceeds the incumbent.  Equal-extent results
    keep the lexicographically smallest offset tuple.

    Raises
    ------
    ResourceLimitError
        When the pruning-free enumeration estimate exceeds subset_ceiling;
        the estimate ignores pruning, so a refusal is a prediction that even
        an optimistic run would be enormous.  Raise the ceiling to override.
    """
    source = as_source(source_or_view)
    k = _validated_k(source, k)
    seed = seed_d = None
    if initial_candidate is not None:
        seed = _validated_candidate(source, initial_candidate, k)
        seed_d = _extent_sq_source(source, seed, math.inf, inclusive=False)
    best, d_sq, examined, pruned = _approx_core(source, k, seed, seed_d)
    initial_extent = math.sqrt(d_sq)

    estimate = estimate_subsets(source, d_sq, k)
    if estimate > subset_ceiling:
        raise ResourceLimitError(
            f"exact enumeration would visit about {estimate:.3e} subsets of size {k}, "
            f"over the ceiling of {subset_ceiling:.3e}; tighten the instance or pass "
            f"a larger subset_ceiling"
        )

    kernel_ok = (
        source.matrix_sq is not None
        and source.gap is not None
        and (_kernels.MAX_EXACT_K is None or k <= _kernels.MAX_EXACT_K)
    )
    best = np.asarray(best, dtype=np.int64)
    for i in range(source.n):
        row = source.row_sq(i)
        js = np.flatnonzero(row <= d_sq)
        js = js[js > i]
        if source.gap is not None:
            js = js[js > i + source.gap]
        else:
            js = np.asarray(
                [j for j in js if not source.overlap(i, int(j))], dtype=np.int64)
        if js.size < k - 1:
            continue
        dists = np.asarray(row[js], dtype=np.float64)
        order = np.lexsort((js, dists))
        cand = np.ascontiguousarray(js[order], dtype=np.int64)
        if kernel_ok:
            d_sq, new_best, ex, pr = _kernels.exact_dfs(
                source.matrix_sq, i, cand, k, source.gap, d_sq, best)
            if new_best is not None:
                best = np.asarray(new_best, dtype=np.int64)
        else:
            qrow = np.array(row, dtype=np.float64, copy=True)
            d_sq, best_t, ex, pr = _exact_dfs_py(
                source, i, [int(c) for c in cand], dists[order], k, d_sq, best, qrow)
            best = np.asarray(best_t, dtype=np.int64)
        examined += ex
        pruned += pr

    motiflet = Motiflet(
        offsets=tuple(int(x) for x in best),
        extent=float(math.sqrt(d_sq)),
        k=k, l=source.l, exactness=EXACT,
    )
    state = SearchState(
        queries=source.n, examined=examined, pruned=pruned,
        initial_extent=initial_extent, final_extent=motiflet.extent,
    )
    return motiflet, state


def _has_clique(mask, size, adj):
    """Whether `mask` (a vertex bitset) contains a clique of `size`."""
    if size <= 0:
        return True
    if mask.bit_count() < size:
        return False
    m = mask
    while m:
        low = m & -m
        v = low.bit_length() - 1
        m ^= low
        if _has_clique(m & adj[v], size - 1, adj):
            return True
    return False


def _lex_min_clique(n, k, adj):
    """Lexicographically smallest k-clique; DFS in ascending vertex order."""
    chosen = []
    found = []

    def rec(mask):
        if len(chosen) == k:
            found.extend(chosen)
            return True
        if mask.bit_count() < k - len(chosen):
            return False
        m = mask
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            chosen.append(v)
            if rec(m & adj[v]):
                return True
            chosen.pop()
        return False

    rec((1 << n) - 1)
    return tuple(found)


def oracle_k_motiflet(source_or_view, k, *, max_items=ORACLE_MAX_ITEMS,
                      max_k=ORACLE_MAX_K):
    """Threshold-sweep verification of the minimal k-set extent.

    Sorts all non-overlapping pairs by distance and adds them as graph edges
    level by level (exact float equality groups a level); the first level
    whose insertion completes a k-clique is the optimal extent, and the
    lexicographically smallest clique at that level is the reported set.
    Exhaustive over distance levels, so it shares no pruning logic with the
    exact search; quadratic memory and worse time, hence the size guards.

    Returns
    -------
    (Motiflet, SearchState)
    """
    source = as_source(source_or_view)
    k = _validated_k(source, k)
    n = source.n
    if n > max_items:
        raise ResourceLimitError(
            f"verification sweep is limited to {max_items} offsets, got {n}"
        )
    if k > max_k:
        raise ResourceLimitError(
            f"verification sweep is limited to k <= {max_k}, got {k}"
        )

    ii, jj, dd = [], [], []
    for i in range(n):
        row = source.row_sq(i)
        for j in range(i + 1, n):
            if not source.overlap(i, j):
                ii.append(i)
                jj.append(j)
                dd.append(float(row[j]))
    order = np.lexsort((
        np.asarray(jj, dtype=np.int64),
        np.asarray(ii, dtype=np.int64),
        np.asarray(dd, dtype=np.float64),
    ))

    adj = [0] * n
    edges_added = 0
    levels = 0
    pos = 0
    total = len(order)
    while pos < total:
        level = dd[order[pos]]
        new_edges = []
        while pos < total and dd[order[pos]] == level:
            t = order[pos]
            a, b = ii[t], jj[t]
            adj[a] |= 1 << b
            adj[b] |= 1 << a
            new_edges.append((a, b))
            edges_added += 1
            pos += 1
        levels += 1
        if any(_has_clique(adj[a] & adj[b], k - 2, adj) for a, b in new_edges):
            offsets = _lex_min_clique(n, k, adj)
            motiflet = Motiflet(
                offsets=offsets, extent=float(math.sqrt(level)),
                k=k, l=source.l, exactness=ORACLE,
            )
            state = SearchState(
                queries=n, examined=edges_added, pruned=0,
                initial_extent=math.inf, final_extent=motiflet.extent,
            )
            return motiflet, state

    raise FeasibilityError(
        f"no {k} mutually non-overlapping offsets found in the sweep"
    )
