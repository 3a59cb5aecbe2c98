"""Learning the set size k and the window length l from the data.

The extent function maps each set size k in [2, k_max] to the extent of the
best found k-set.  It is evaluated top-down: the search at k seeds the
search at k-1 with the best (k-1)-subset of its winner, which both reuses
work and makes the approximate profile monotone nondecreasing in k.

Pronounced elbows of the extent function mark natural set sizes: an elbow
fires at k when the step after k dwarfs the step before it.  Window lengths
are ranked by the area under the min-max normalized extent function divided
by the number of elbows; informative lengths have long flat stretches and
sharp elbows, giving small scores.
"""

import math
from dataclasses import dataclass

import numpy as np

from .distances import as_source, compute_distance_source
from .errors import FeasibilityError, ParameterError
from .search import (APPROXIMATE, EXACT, Motiflet, _approx_core,
                     _extent_sq_source, exact_k_motiflet)
from .series import exclusion_gap, make_series_view

DEFAULT_ALPHA = 5.0
EPSILON_SCALE = 1e-9


@dataclass(frozen=True)
class ExtentProfile:
    """Extent of the best found k-set for every k in [2, top].

    ks and extents are aligned; top is min(k_max, capacity) and truncated
    says whether the capacity clipped the requested range.  motiflets holds
    the winning set per k.  dips lists any k where the profile decreases
    from k to k+1 (cannot happen with seeded evaluation; kept as a
    diagnostic).
    """

    l: object
    ks: tuple
    extents: tuple
    motiflets: tuple
    mode: str
    k_max: int
    truncated: bool
    dips: tuple

    def extent_at(self, k):
        return self.extents[self.ks.index(k)]


@dataclass(frozen=True)
class LengthScore:
    """Ranking record for one window length."""

    l: int
    au_ef: float
    elbow_ks: tuple
    k_top: int
    truncated: bool


def _drop_one_seed(source, offsets):
    """Best (m-1)-subset of a set: smallest extent, ties to smaller tuple."""
    offs = [int(o) for o in offsets]
    best_key = None
    for drop in range(len(offs)):
        sub = tuple(offs[:drop] + offs[drop + 1 :])
        ext = _extent_sq_source(source, sub, math.inf, inclusive=False)
        key = (ext, sub)
        if best_key is None or key < best_key:
            best_key = key
    return np.asarray(best_key[1], dtype=np.int64), best_key[0]


def extent_function(source_or_view, k_max, mode=APPROXIMATE, **search_kwargs):
    """Evaluate the extent function over k in [2, min(k_max, capacity)].

    Parameters
    ----------
    source_or_view : SeriesView or DistanceSource
    k_max : int
        Largest set size, >= 3.
    mode : str
        "approximate" (default) or "exact".
    search_kwargs
        Passed through to exact_k_motiflet in exact mode (subset_ceiling).

    Returns
    -------
    ExtentProfile
    """
    source = as_source(source_or_view)
    if not isinstance(k_max, (int, np.integer)) or int(k_max) < 3:
        raise ParameterError(f"k_max must be an integer >= 3, got {k_max!r}")
    k_max = int(k_max)
    if mode not in (APPROXIMATE, EXACT):
        raise ParameterError(f"mode must be {APPROXIMATE!r} or {EXACT!r}, got {mode!r}")
    cap = source.capacity()
    if cap < 2:
        raise FeasibilityError(
            f"capacity {cap}: no two non-overlapping offsets to compare"
        )
    top = min(k_max, cap)
    truncated = top < k_max

    by_k = {}
    seed = seed_d = None
    for k in range(top, 1, -1):
        if mode == EXACT:
            motiflet, _ = exact_k_motiflet(
                source, k,
                initial_candidate=None if seed is None else seed,
                **search_kwargs,
            )
            offsets = np.asarray(motiflet.offsets, dtype=np.int64)
            by_k[k] = motiflet
        else:
            offsets, d_sq, _, _ = _approx_core(source, k, seed, seed_d)
            by_k[k] = Motiflet(
                offsets=tuple(int(x) for x in offsets),
                extent=float(math.sqrt(d_sq)),
                k=k, l=source.l, exactness=APPROXIMATE,
            )
        if k > 2:
            seed, seed_d = _drop_one_seed(source, offsets)

    ks = tuple(range(2, top + 1))
    extents = tuple(by_k[k].extent for k in ks)
    dips = tuple(
        ks[t] for t in range(len(ks) - 1) if extents[t] > extents[t + 1]
    )
    return ExtentProfile(
        l=source.l, ks=ks, extents=extents,
        motiflets=tuple(by_k[k] for k in ks),
        mode=mode, k_max=k_max, truncated=truncated, dips=dips,
    )


def _extent_array(profile_or_extents):
    if isinstance(profile_or_extents, ExtentProfile):
        return np.asarray(profile_or_extents.extents, dtype=np.float64)
    arr = np.asarray(list(profile_or_extents), dtype=np.float64)
    if arr.ndim != 1:
        raise ParameterError("extents must be a flat sequence")
    return arr


def find_elbows(profile_or_extents, alpha=DEFAULT_ALPHA, epsilon=None):
    """Set sizes at which the extent function bends sharply upward.

    An elbow fires at k when (p(k+1) - p(k) + eps) / (p(k) - p(k-1) + eps)
    exceeds alpha; both neighbors must exist, so only interior sizes fire.
    eps defaults to 1e-9 of the largest extent and keeps near-zero steps
    from manufacturing spurious ratios.

    Returns the firing k values, ascending.
    """
    p = _extent_array(profile_or_extents)
    if alpha <= 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    if p.size < 3:
        return []
    eps = float(epsilon) if epsilon is not None else EPSILON_SCALE * float(p.max())
    if eps < 0:
        raise ParameterError(f"epsilon must be >= 0, got {eps}")
    fired = []
    for t in range(1, p.size - 1):
        den = p[t] - p[t - 1] + eps
        num = p[t + 1] - p[t] + eps
        if den > 0 and num / den > alpha:
            fired.append(t + 2)
    return fired


def au_ef(profile_or_extents, alpha=DEFAULT_ALPHA, epsilon=None):
    """Area under the min-max normalized extent function, elbow-discounted.

    Mean of (p - min) / (max - min) over the evaluated sizes, divided by
    max(1, number of elbows).  A constant profile scores 0.  Lower is
    better: long flat stretches and sharp elbows shrink the score.
    """
    p = _extent_array(profile_or_extents)
    mx = float(p.max())
    mn = float(p.min())
    if mx == mn:
        return 0.0
    norm = (p - mn) / (mx - mn)
    elbows = find_elbows(p, alpha=alpha, epsilon=epsilon)
    return float(norm.sum() / p.size / max(1, len(elbows)))


def _validated_grid(l_grid, n):
    try:
        ls = sorted({int(l) for l in l_grid})
    except (TypeError, ValueError):
        raise ParameterError(f"length grid must hold integers, got {l_grid!r}")
    if not ls:
        raise ParameterError("length grid is empty")
    bad = [l for l in ls if l < 2 or n - l + 1 < exclusion_gap(l) + 2]
    if bad:
        raise ParameterError(
            f"window lengths {bad} leave fewer than two non-overlapping "
            f"windows in a series of {n} points"
        )
    return ls


def select_length(values, l_grid, k_max, *, alpha=DEFAULT_ALPHA, epsilon=None,
                  flat_policy="zero", memory_policy="auto", budget=None):
    """Pick the window length whose extent profile is most informative.

    Evaluates the approximate extent function at every grid length and
    scores each with au_ef; the smallest score wins, ties going to the
    smaller length.

    Returns
    -------
    (best_l, scores) : int and list of LengthScore, grid order.
    """
    arr = np.asarray(values, dtype=np.float64)
    ls = _validated_grid(l_grid, arr.size)
    scores = []
    best = None
    for l in ls:
        view = make_series_view(arr, l, flat_policy=flat_policy)
        source = compute_distance_source(view, policy=memory_policy, budget=budget)
        profile = extent_function(source, k_max, APPROXIMATE)
        elbow_ks = tuple(find_elbows(profile, alpha=alpha, epsilon=epsilon))
        score = au_ef(profile, alpha=alpha, epsilon=epsilon)
        scores.append(LengthScore(
            l=l, au_ef=score, elbow_ks=elbow_ks,
            k_top=profile.ks[-1], truncated=profile.truncated,
        ))
        if best is None or score < best[0]:
            best = (score, l)
    return best[1], scores
