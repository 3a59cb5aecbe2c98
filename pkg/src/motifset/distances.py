"""Distance sources: one interface over three evaluation strategies.

All engine components consume pairwise z-normalized Euclidean distances
through a DistanceSource, which hides where the numbers come from:

materialized
    The full squared matrix, built in O(n^2) independent of window length by
    rolling dot products along diagonals.
streaming
    Rows computed on demand for series too long to materialize; sequential
    row access rolls in O(n') per row with periodic direct re-anchoring.
abstract
    A caller-supplied distance matrix over arbitrary objects, with overlap
    defined by an index gap or an arbitrary symmetric predicate.  This is how
    non-series geometries (and worst-case constructions) are fed to the
    search algorithms.

Distances are handled squared internally; public surfaces report plain
distances.  Squared values are clamped to [0, 4l].  Overlap for series
sources is |i - j| <= floor(l / 2).
"""

import os
import struct

import numpy as np

from . import _kernels, series
from .errors import CapacityError, InputError, ParameterError

DEFAULT_MEMORY_BUDGET = 2_147_483_648
MEMORY_BUDGET_ENV = "MOTIFSET_MEMORY_BUDGET"

# Sequential streaming rows re-anchor with a direct correlation pass this
# often; between anchors each row costs one O(n') roll.
STREAM_REFRESH = 512

MATRIX_MAGIC = b"MTLD"
MATRIX_VERSION = 1
_HEADER = struct.Struct("<4sIII")

POLICY_AUTO = "auto"
POLICY_MATERIALIZE = "materialize"
POLICY_ON_DEMAND = "on-demand"
MEMORY_POLICIES = (POLICY_AUTO, POLICY_MATERIALIZE, POLICY_ON_DEMAND)


def resolve_memory_budget(budget=None):
    """Byte budget for materializing: explicit value, else env var, else 2 GiB."""
    if budget is not None:
        try:
            value = int(budget)
        except (TypeError, ValueError):
            raise ParameterError(f"memory budget must be an integer byte count, got {budget!r}")
    else:
        raw = os.environ.get(MEMORY_BUDGET_ENV, "").strip()
        if not raw:
            return DEFAULT_MEMORY_BUDGET
        try:
            value = int(raw)
        except ValueError:
            raise ParameterError(
                f"{MEMORY_BUDGET_ENV}={raw!r} is not an integer byte count"
            )
    if value <= 0:
        raise ParameterError(f"memory budget must be positive, got {value}")
    return value


class NeighborList:
    """Result of a row kNN query: the query offset followed by its neighbors.

    Offsets are in admission order (query first); distances are plain (not
    squared) and aligned with offsets, so distances[0] == 0.
    """

    __slots__ = ("query", "offsets", "distances")

    def __init__(self, query, offsets, distances):
        self.query = int(query)
        self.offsets = offsets
        self.distances = distances

    @property
    def neighbors(self):
        return self.offsets[1:]

    def __len__(self):
        return self.offsets.size

    def __repr__(self):
        return f"NeighborList(query={self.query}, offsets={self.offsets.tolist()})"


class DistanceSource:
    """Uniform access to pairwise squared distances and overlap structure.

    Not constructed directly; use compute_distance_source (series) or
    matrix_source (abstract).  Rows returned by row_sq may be views into
    shared storage and must not be mutated.
    """

    def __init__(self, *, kind, n, l=None, gap=None, predicate=None,
                 matrix_sq=None, view=None):
        self.kind = kind
        self.n = int(n)
        self.l = None if l is None else int(l)
        self.gap = None if gap is None else int(gap)
        self.predicate = predicate
        self.matrix_sq = matrix_sq
        self.view = view
        self._capacity = None
        self._q_row = None
        self._q_index = -2
        self._rolls = 0

    # -- overlap ---------------------------------------------------------

    def overlap(self, i, j):
        """Whether offsets i and j are trivial matches (self-overlap included)."""
        if self.gap is not None:
            return abs(int(i) - int(j)) <= self.gap
        if i == j:
            return True
        a, b = (i, j) if i < j else (j, i)
        return bool(self.predicate(a, b))

    def capacity(self):
        """Largest achievable set of mutually non-overlapping offsets.

        Computed by greedy ascending packing, which is optimal for interval
        (gap) overlap; for predicate sources it is the packing the engine
        itself could reach, used for the same feasibility decisions.
        """
        if self._capacity is None:
            if self.gap is not None:
                self._capacity = 1 + (self.n - 1) // (self.gap + 1)
            else:
                chosen = []
                for i in range(self.n):
                    if all(not self.predicate(c, i) for c in chosen):
                        chosen.append(i)
                self._capacity = len(chosen)
        return self._capacity

    # -- distances ---------------------------------------------------------

    def pair_sq(self, i, j):
        """Squared distance of one pair.  No bounds checking (hot path)."""
        if self.matrix_sq is not None:
            return float(self.matrix_sq[i, j])
        if i == j:
            return 0.0
        a, b = (i, j) if i < j else (j, i)
        return self._pair_sq_direct(a, b)

    def row_sq(self, i):
        """All squared distances from offset i.  May return a shared view."""
        if self.matrix_sq is not None:
            return self.matrix_sq[i]
        return self._stream_row(i)

    # -- streaming internals ----------------------------------------------

    def _pair_sq_direct(self, a, b):
        view = self.view
        l = view.l
        fa, fb = bool(view.flat[a]), bool(view.flat[b])
        if fa and fb:
            return 0.0
        if fa or fb:
            return float(l)
        q = float(np.dot(view.values[a : a + l], view.values[b : b + l]))
        d = 2.0 * l * (1.0 - (q - l * view.means[a] * view.means[b])
                       / (l * view.stds[a] * view.stds[b]))
        return float(min(max(d, 0.0), 4.0 * l))

    def _anchor_q(self, i):
        view = self.view
        window = view.values[i : i + view.l]
        return np.correlate(view.values, window, mode="valid")

    def _stream_row(self, i):
        view = self.view
        n = self.n
        if i == self._q_index + 1 and self._rolls < STREAM_REFRESH:
            v = view.values
            l = view.l
            prev = self._q_row
            q = np.empty(n)
            q[1:] = prev[:-1] + v[i - 1 + l] * v[l:] - v[i - 1] * v[: n - 1]
            q[0] = np.dot(v[i : i + l], v[:l])
            self._rolls += 1
        else:
            q = self._anchor_q(i)
            self._rolls = 0
        self._q_row = q
        self._q_index = i
        return self._row_from_q(q, i)

    def _row_from_q(self, q, i):
        view = self.view
        l = view.l
        flat = view.flat
        if flat[i]:
            d = np.where(flat, 0.0, float(l))
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                d = 2.0 * l * (1.0 - (q - l * view.means[i] * view.means)
                               / (l * view.stds[i] * view.stds))
            d = np.where(flat, float(l), d)
            np.clip(d, 0.0, 4.0 * l, out=d)
        d[i] = 0.0
        return d


def compute_distance_source(view, policy=POLICY_AUTO, budget=None):
    """Bind a SeriesView to a distance evaluation strategy.

    Parameters
    ----------
    view : SeriesView
    policy : str
        "auto" materializes the full squared matrix when it fits the memory
        budget and streams otherwise; "materialize" and "on-demand" force
        one strategy ("materialize" raises CapacityError over budget).
    budget : int, optional
        Byte budget override; default is MOTIFSET_MEMORY_BUDGET or 2 GiB.
    """
    if policy not in MEMORY_POLICIES:
        raise ParameterError(
            f"unknown memory policy {policy!r}; choose from {MEMORY_POLICIES}"
        )
    n = view.n_windows
    gap = series.exclusion_gap(view.l)
    need = n * n * 8
    limit = resolve_memory_budget(budget)
    materialize = policy == POLICY_MATERIALIZE or (policy == POLICY_AUTO and need <= limit)
    if policy == POLICY_MATERIALIZE and need > limit:
        raise CapacityError(
            f"materializing {n} x {n} squared distances needs {need} bytes, "
            f"over the {limit}-byte budget; raise {MEMORY_BUDGET_ENV} or use "
            f"the on-demand policy"
        )
    if materialize:
        matrix = _kernels.build_matrix_sq(
            view.values, view.l, view.means, view.stds,
            np.ascontiguousarray(view.flat, dtype=np.uint8),
        )
        return DistanceSource(kind="materialized", n=n, l=view.l, gap=gap,
                              matrix_sq=matrix, view=view)
    return DistanceSource(kind="streaming", n=n, l=view.l, gap=gap, view=view)


def matrix_source(matrix, exclusion=0, squared=False):
    """Wrap a caller-supplied distance matrix as an abstract source.

    Parameters
    ----------
    matrix : (n, n) array_like
        Symmetric, zero diagonal, non-negative, finite.  Plain distances by
        default; pass squared=True if entries are already squared.
    exclusion : int or callable
        Overlap structure.  An integer g marks i, j as overlapping when
        |i - j| <= g (0 means only self-overlap).  A callable pred(i, j),
        called with i < j, marks overlapping pairs; it must be symmetric in
        meaning since only the canonical order is consulted.
    """
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ParameterError(f"distance matrix must be square, got shape {arr.shape}")
    n = arr.shape[0]
    if n < 1:
        raise ParameterError("distance matrix is empty")
    if not np.isfinite(arr).all():
        raise ParameterError("distance matrix contains non-finite entries")
    if (arr < 0).any():
        raise ParameterError("distance matrix contains negative entries")
    if not np.array_equal(arr, arr.T):
        raise ParameterError("distance matrix is not symmetric")
    if np.diagonal(arr).any():
        raise ParameterError("distance matrix diagonal must be zero")
    sq = np.ascontiguousarray(arr if squared else arr * arr)
    gap = None
    predicate = None
    if callable(exclusion):
        predicate = exclusion
    else:
        gap = int(exclusion)
        if gap < 0:
            raise ParameterError(f"exclusion gap must be >= 0, got {gap}")
    return DistanceSource(kind="abstract", n=n, gap=gap, predicate=predicate,
                          matrix_sq=sq)


def as_source(obj, policy=POLICY_AUTO, budget=None):
    """Coerce a SeriesView or DistanceSource to a DistanceSource."""
    if isinstance(obj, DistanceSource):
        return obj
    if isinstance(obj, series.SeriesView):
        return compute_distance_source(obj, policy=policy, budget=budget)
    raise ParameterError(
        f"expected a SeriesView or DistanceSource, got {type(obj).__name__}"
    )


def _greedy_predicate(source, row, query, k, bound_sq):
    """Greedy kNN when overlap is a predicate: sorted scan, query seeded."""
    order = np.argsort(row, kind="stable")
    selected = [int(query)]
    for j in order:
        if len(selected) == k:
            break
        j = int(j)
        if j == query:
            continue
        if not row[j] < bound_sq:
            break
        if any(source.overlap(j, s) for s in selected):
            continue
        selected.append(j)
    return np.asarray(selected, dtype=np.int64)


def greedy_knn(source, query, k, bound_sq=np.inf, row=None):
    """Greedy non-overlapping nearest neighbors, squared-bound interface.

    Admits offsets closest-first (ties to the smaller offset), skipping any
    that overlap an admitted one, while the candidate's squared distance is
    strictly below bound_sq.  Returns int64 offsets in admission order,
    query first; fewer than k entries when the row runs out of admissible
    mass below the bound.
    """
    if row is None:
        row = source.row_sq(query)
    if source.gap is not None:
        return _kernels.knn_greedy_sq(
            np.ascontiguousarray(row, dtype=np.float64),
            int(query), source.gap, int(k), float(bound_sq),
        )
    return _greedy_predicate(source, row, query, k, bound_sq)


def row_knn(source_or_view, query, k, bound=np.inf):
    """k nearest non-overlapping neighbors of one offset (query included).

    Parameters
    ----------
    source_or_view : DistanceSource or SeriesView
    query : int
    k : int
        Total size of the returned set, query included; k >= 1.
    bound : float
        Plain (unsquared) admission bound; candidates at or above it stop
        the scan.

    Returns
    -------
    NeighborList with plain distances in admission order.
    """
    source = as_source(source_or_view)
    query = int(query)
    if not 0 <= query < source.n:
        raise ParameterError(f"query offset {query} outside [0, {source.n})")
    k = int(k)
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    bound = float(bound)
    if not bound > 0:
        raise ParameterError(f"bound must be positive, got {bound}")
    bound_sq = bound * bound if np.isfinite(bound) else np.inf
    row = source.row_sq(query)
    offsets = greedy_knn(source, query, k, bound_sq, row=row)
    dist = np.sqrt(np.asarray([row[int(o)] for o in offsets], dtype=np.float64))
    dist[0] = 0.0
    return NeighborList(query, offsets, dist)


def write_matrix_dump(path, matrix_sq, l):
    """Write a squared-distance matrix in the MTLD binary format.

    Layout: magic b"MTLD", version, window count n', window length l (three
    little-endian uint32 after the magic), then n' * n' float64 squared
    distances, row-major little-endian.
    """
    arr = np.ascontiguousarray(matrix_sq, dtype="<f8")
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ParameterError(f"matrix dump needs a square matrix, got {arr.shape}")
    n = arr.shape[0]
    header = _HEADER.pack(MATRIX_MAGIC, MATRIX_VERSION, n, int(l))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(arr.tobytes())


def read_matrix_dump(path):
    """Read an MTLD dump; returns (matrix_sq, l)."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise InputError(f"{path}: truncated header")
        magic, version, n, l = _HEADER.unpack(head)
        if magic != MATRIX_MAGIC:
            raise InputError(f"{path}: bad magic {magic!r}, expected {MATRIX_MAGIC!r}")
        if version != MATRIX_VERSION:
            raise InputError(f"{path}: unsupported version {version}")
        body = fh.read()
    expected = n * n * 8
    if len(body) != expected:
        raise InputError(
            f"{path}: body holds {len(body)} bytes, expected {expected} "
            f"for {n} x {n} float64"
        )
    matrix = np.frombuffer(body, dtype="<f8").reshape(n, n).copy()
    return matrix, int(l)
