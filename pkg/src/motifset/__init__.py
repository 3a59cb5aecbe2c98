"""Motif-set discovery for univariate time series.

Finds the set of k non-overlapping windows of length l whose largest
pairwise z-normalized Euclidean distance (the set's extent) is minimal, and
learns good values of k and l from the data.  Distances stream in O(n^2)
independent of l; inner loops run in a compiled extension when available,
with an equivalent pure NumPy fallback (see motifset.backend_name).
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as backend_name
from .distances import (DistanceSource, NeighborList, compute_distance_source,
                        matrix_source, read_matrix_dump, row_knn,
                        write_matrix_dump)
from .errors import (CandidateOverlapError, CapacityError,
                     DegenerateWindowError, FeasibilityError, InputError,
                     MotifsetError, ParameterError, ResourceLimitError)
from .fixtures import FIXTURE_KINDS, Fixture, generate_fixture
from .learning import (ExtentProfile, LengthScore, au_ef, extent_function,
                       find_elbows, select_length)
from .search import (Motiflet, SearchState, approx_k_motiflet,
                     exact_k_motiflet, oracle_k_motiflet)
from .series import (SeriesView, make_series_view, overlaps, sliding_stats,
                     znorm_distance_naive)


def pairwise_extent(source_or_view, offsets, bound=None):
    """Largest pairwise distance within a set of offsets.

    Validates that the offsets are mutually non-overlapping, then scans the
    pairs with early abandoning: when `bound` is given, returns inf as soon
    as any pair reaches it.

    Parameters
    ----------
    source_or_view : SeriesView or DistanceSource
    offsets : iterable of int
    bound : float, optional
        Plain (unsquared) abandonment threshold.
    """
    import math

    import numpy as np

    from .distances import as_source
    from .search import _extent_sq_source

    source = as_source(source_or_view)
    offs = sorted(int(o) for o in offsets)
    if not offs:
        raise ParameterError("need at least one offset")
    for o in offs:
        if not 0 <= o < source.n:
            raise ParameterError(f"offset {o} outside [0, {source.n})")
    for a in range(len(offs)):
        for b in range(a + 1, len(offs)):
            if source.overlap(offs[a], offs[b]):
                raise CandidateOverlapError(
                    f"offsets {offs[a]} and {offs[b]} overlap"
                )
    bound_sq = math.inf if bound is None else float(bound) ** 2
    ext = _extent_sq_source(source, offs, bound_sq, inclusive=False)
    return math.inf if ext == math.inf else float(np.sqrt(ext))


__all__ = [
    "__version__",
    "backend_name",
    "pairwise_extent",
    "SeriesView", "make_series_view", "overlaps", "sliding_stats",
    "znorm_distance_naive",
    "DistanceSource", "NeighborList", "compute_distance_source",
    "matrix_source", "row_knn", "write_matrix_dump", "read_matrix_dump",
    "Motiflet", "SearchState", "approx_k_motiflet", "exact_k_motiflet",
    "oracle_k_motiflet",
    "ExtentProfile", "LengthScore", "extent_function", "find_elbows",
    "au_ef", "select_length",
    "Fixture", "FIXTURE_KINDS", "generate_fixture",
    "MotifsetError", "ParameterError", "FeasibilityError",
    "ResourceLimitError", "InputError", "CapacityError",
    "DegenerateWindowError", "CandidateOverlapError",
]
