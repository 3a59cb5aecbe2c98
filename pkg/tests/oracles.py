"""Independent reference implementations used to check the engine.

Everything here is written from the definitions, in the most direct way
possible, and deliberately shares no code or algorithmic structure with the
package: two-pass statistics, per-pair z-normalization in extended precision,
full O(n^2 * l) matrix construction, literal greedy kNN, and literal
brute-force subset enumeration.  Slow on purpose; only used at small sizes.
"""

import itertools
import math

import numpy as np

FLAT_FRACTION = 1e-8


def two_pass_stats(values, l):
    """Window means/stds computed independently per window (population std)."""
    values = np.asarray(values, dtype=np.float64)
    n_windows = values.size - l + 1
    means = np.empty(n_windows)
    stds = np.empty(n_windows)
    for i in range(n_windows):
        w = values[i : i + l]
        mu = float(np.mean(w))
        means[i] = mu
        stds[i] = math.sqrt(float(np.mean((w - mu) ** 2)))
    return means, stds


def flat_mask(values, l):
    """Flatness per window: std <= FLAT_FRACTION * global value range."""
    values = np.asarray(values, dtype=np.float64)
    _, stds = two_pass_stats(values, l)
    value_range = float(np.max(values) - np.min(values))
    return stds <= FLAT_FRACTION * value_range


def znorm_distance_longdouble(w1, w2):
    """z-normalized Euclidean distance of two windows in extended precision."""
    a = np.asarray(w1, dtype=np.longdouble)
    b = np.asarray(w2, dtype=np.longdouble)
    za = (a - a.mean()) / np.sqrt(((a - a.mean()) ** 2).mean())
    zb = (b - b.mean()) / np.sqrt(((b - b.mean()) ** 2).mean())
    return float(np.sqrt(((za - zb) ** 2).sum()))


def naive_matrix_sq(values, l):
    """Squared z-normalized distance matrix, straight from the definition.

    Windows are z-normalized one by one with two-pass statistics; flat
    windows (std at or below the flatness floor) normalize to zeros.
    """
    values = np.asarray(values, dtype=np.float64)
    n_windows = values.size - l + 1
    means, stds = two_pass_stats(values, l)
    flat = flat_mask(values, l)
    z = np.empty((n_windows, l))
    for i in range(n_windows):
        if flat[i]:
            z[i] = 0.0
        else:
            z[i] = (values[i : i + l] - means[i]) / stds[i]
    out = np.zeros((n_windows, n_windows))
    for i in range(n_windows):
        diff = z[i + 1 :] - z[i]
        row = np.einsum("ij,ij->i", diff, diff)
        out[i, i + 1 :] = row
        out[i + 1 :, i] = row
    return out


def greedy_knn_reference(row, query, gap, k, bound=math.inf):
    """Literal restatement of the greedy neighbor rule.

    The query is seeded first; remaining offsets are admitted in ascending
    (distance, offset) order when strictly inside the bound and
    non-overlapping with everything already selected.
    """
    selected = [query]
    order = sorted(range(len(row)), key=lambda j: (row[j], j))
    for j in order:
        if len(selected) == k:
            break
        if j == query or not row[j] < bound:
            continue
        if all(abs(j - s) > gap for s in selected):
            selected.append(j)
    return selected


def brute_force_motiflet(matrix_sq, k, gap=None, overlap=None):
    """Literal minimal-extent k-subset by full enumeration.

    Returns (extent_sq, offsets) with ties broken toward the
    lexicographically smallest sorted offset tuple.  Exponential; keep the
    instance tiny.
    """
    n = matrix_sq.shape[0]
    if overlap is None:
        overlap = lambda i, j: abs(i - j) <= gap
    best = None
    for combo in itertools.combinations(range(n), k):
        if any(
            overlap(a, b) for a, b in itertools.combinations(combo, 2)
        ):
            continue
        ext = max(matrix_sq[a, b] for a, b in itertools.combinations(combo, 2))
        key = (ext, combo)
        if best is None or key < best:
            best = key
    if best is None:
        return None
    return best[0], best[1]


def max_nonoverlap_count(n_windows, gap):
    """How many pairwise non-overlapping offsets fit in [0, n_windows)."""
    if n_windows <= 0:
        return 0
    return 1 + (n_windows - 1) // (gap + 1)


def extent_profile_reference(matrix_sq, k_values, gap):
    """Exact EF via brute force, one independent run per k."""
    out = {}
    for k in k_values:
        res = brute_force_motiflet(matrix_sq, k, gap=gap)
        out[k] = math.sqrt(res[0]) if res is not None else None
    return out


def elbow_reference(extents, alpha=5.0, epsilon=None):
    """Slope-ratio elbow test restated from the definition.

    `extents` maps k -> EF(k) for consecutive k starting at 2.  The test
    fires at k when (p(k+1) - p(k) + eps) / (p(k) - p(k-1) + eps) > alpha.
    """
    ks = sorted(extents)
    if epsilon is None:
        epsilon = 1e-9 * max(extents[k] for k in ks)
    fired = []
    for k in ks[1:-1]:
        m1 = extents[k + 1] - extents[k] + epsilon
        m2 = extents[k] - extents[k - 1] + epsilon
        if m2 != 0 and m1 / m2 > alpha:
            fired.append(k)
    return fired


def au_ef_reference(extents, elbow_count):
    """Area under the min-max normalized EF curve, per the documented scaling."""
    vals = np.asarray([extents[k] for k in sorted(extents)], dtype=np.float64)
    lo, hi = vals.min(), vals.max()
    if hi == lo:
        return 0.0
    norm = (vals - lo) / (hi - lo)
    return float(norm.sum() / len(vals) / max(1, elbow_count))
