"""Kernel dispatch: compiled extension when available, pure NumPy otherwise.

The two implementations expose the same six functions with identical
semantics (see ``motifset._purepy`` for the reference docstrings):

    sliding_stats_kernel(values, l)          -> (means, stds)
    build_matrix_sq(values, l, means, stds, flat_u8) -> matrix
    knn_greedy_sq(row_sq, query, gap, k, bound_sq)   -> offsets
    extent_sq_lookup(matrix_sq, offsets_i64, bound_sq, inclusive) -> float
    approx_scan(matrix_sq, gap, k, d0_sq, seed)      -> (best, d_sq, ex, pr)
    exact_dfs(matrix_sq, query, cand_i64, k, gap, d_sq, best) -> (d_sq, best, ex, pr)

Selection order: the MOTIFSET_BACKEND environment variable ("ext" or
"python") wins when set; otherwise the compiled module is used if it
imports, with a silent fallback to pure Python.  Float arrays must be
contiguous float64, offset arrays int64, and flatness masks uint8 views of
the boolean mask.
"""

import os

from . import _purepy

_FORCED = os.environ.get("MOTIFSET_BACKEND", "").strip().lower()

if _FORCED == "python":
    _impl = _purepy
elif _FORCED == "ext":
    from . import _ext as _impl
elif _FORCED:
    raise ImportError(
        f"MOTIFSET_BACKEND={_FORCED!r} is not recognized; use 'ext' or 'python'"
    )
else:
    try:
        from . import _ext as _impl
    except ImportError:
        _impl = _purepy

BACKEND = _impl.BACKEND

sliding_stats_kernel = _impl.sliding_stats_kernel
build_matrix_sq = _impl.build_matrix_sq
knn_greedy_sq = _impl.knn_greedy_sq
extent_sq_lookup = _impl.extent_sq_lookup
approx_scan = _impl.approx_scan
exact_dfs = _impl.exact_dfs

MAX_EXACT_K = getattr(_impl, "MAX_EXACT_K", None)
