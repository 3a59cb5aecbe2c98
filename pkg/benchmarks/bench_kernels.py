"""Compare the compiled kernels with the pure NumPy fallback.

Runs the distance matrix build, the approximate scan, and the exact search
on the same random-walk series under both backends and prints a timing
table.  Run from a tree where both backends import:

    python benchmarks/bench_kernels.py [n ...]
"""

import sys
import time

import numpy as np

from motifset import _purepy
from motifset.series import make_series_view

try:
    from motifset import _ext
except ImportError:
    _ext = None


def _series(n, seed=7):
    rng = np.random.default_rng(seed)
    return np.cumsum(rng.standard_normal(n))


def _time(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_one(n, l=64, k=6):
    values = _series(n)
    view = make_series_view(values, l)
    flat = np.ascontiguousarray(view.flat, dtype=np.uint8)
    rows = []

    builds = {}
    for name, impl in (("python", _purepy),) + ((("ext", _ext),) if _ext else ()):
        t, matrix = _time(impl.build_matrix_sq, view.values, l, view.means,
                          view.stds, flat)
        builds[name] = matrix
        rows.append((f"build {n}x{n}", name, t))
    if _ext is not None:
        worst = float(np.abs(builds["python"] - builds["ext"]).max())
        assert worst < 1e-6 * np.sqrt(4 * l), f"backend mismatch {worst}"

    gap = l // 2
    for name, impl in (("python", _purepy),) + ((("ext", _ext),) if _ext else ()):
        matrix = builds[name]
        t, _ = _time(impl.approx_scan, matrix, gap, k, float("inf"), None)
        rows.append((f"approx k={k}", name, t))

    for name, impl in (("python", _purepy),) + ((("ext", _ext),) if _ext else ()):
        matrix = builds[name]
        best, d_sq, _, _ = impl.approx_scan(matrix, gap, k, float("inf"), None)
        best = np.sort(np.asarray(best, dtype=np.int64))
        query = int(best[0])
        row = matrix[query]
        js = np.flatnonzero(row <= d_sq)
        js = js[js > query + gap]
        order = np.lexsort((js, row[js]))
        cand = np.ascontiguousarray(js[order], dtype=np.int64)
        t, _ = _time(impl.exact_dfs, matrix, query, cand, k, gap, d_sq, best)
        rows.append((f"exact dfs k={k}", name, t))

    return rows


def main(argv):
    sizes = [int(a) for a in argv[1:]] or [1000, 4000, 8000]
    print(f"{'task':<20} {'backend':<8} {'seconds':>10}")
    speedups = {}
    for n in sizes:
        for task, name, t in bench_one(n):
            print(f"{task:<20} {name:<8} {t:>10.4f}")
            speedups.setdefault(task, {})[name] = t
        print()
    if _ext is not None:
        print("speedup (python / ext), last size:")
        for task, times in speedups.items():
            if "ext" in times and times["ext"] > 0:
                print(f"  {task:<20} {times['python'] / times['ext']:.1f}x")


if __name__ == "__main__":
    main(sys.argv)
