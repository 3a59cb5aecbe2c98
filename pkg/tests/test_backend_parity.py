"""The compiled and pure-Python kernels must make identical decisions."""

import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from motifset import _purepy, io, series
from tests.conftest import random_walk

ext = pytest.importorskip(
    "motifset._ext", reason="compiled extension not built on this platform"
)


def kernel_inputs(seed, n, l):
    values = random_walk(seed, n)
    view = series.make_series_view(values, l)
    flat = np.ascontiguousarray(view.flat, dtype=np.uint8)
    return view, flat


class TestStatsParity:
    def test_stats_agree(self):
        for seed, n, l in [(0, 300, 20), (1, 1000, 128), (2, 77, 2)]:
            values = np.ascontiguousarray(random_walk(seed, n))
            me, se = ext.sliding_stats_kernel(values, l)
            mp, sp = _purepy.sliding_stats_kernel(values, l)
            scale = max(1.0, float(np.abs(values).max()))
            assert np.max(np.abs(me - mp)) <= 1e-10 * scale
            assert np.max(np.abs(se - sp)) <= 1e-10 * scale


class TestMatrixParity:
    def test_matrices_agree(self):
        for seed, n, l in [(3, 400, 25), (4, 200, 10)]:
            view, flat = kernel_inputs(seed, n, l)
            a = ext.build_matrix_sq(view.values, l, view.means, view.stds, flat)
            b = _purepy.build_matrix_sq(view.values, l, view.means, view.stds, flat)
            a, b = np.asarray(a), np.asarray(b)
            assert np.max(np.abs(a - b)) <= 1e-9 * 4 * l

    def test_flat_branches_agree_exactly(self):
        values = random_walk(5, 300)
        values[40:90] = 1.5
        view = series.make_series_view(values, 20)
        flat = np.ascontiguousarray(view.flat, dtype=np.uint8)
        a = np.asarray(ext.build_matrix_sq(view.values, 20, view.means, view.stds, flat))
        b = np.asarray(
            _purepy.build_matrix_sq(view.values, 20, view.means, view.stds, flat)
        )
        idx = np.flatnonzero(view.flat)
        assert np.array_equal(a[idx], b[idx])
        assert np.array_equal(a[:, idx], b[:, idx])


@pytest.fixture(scope="module")
def shared_matrix():
    # one matrix, same float values into both backends
    view, flat = kernel_inputs(6, 350, 20)
    m = np.asarray(ext.build_matrix_sq(view.values, 20, view.means, view.stds, flat))
    return np.ascontiguousarray(m), view


class TestDecisionParity:
    def test_greedy_knn_identical(self, shared_matrix):
        m, view = shared_matrix
        gap = series.exclusion_gap(view.l)
        rng = np.random.default_rng(0)
        for _ in range(40):
            q = int(rng.integers(0, m.shape[0]))
            k = int(rng.integers(2, 8))
            bound = float(rng.choice([np.inf, 1.0, 4.0, 16.0]))
            a = np.asarray(ext.knn_greedy_sq(m[q], q, gap, k, bound))
            b = _purepy.knn_greedy_sq(m[q], q, gap, k, bound)
            assert np.array_equal(a, b)

    def test_extent_lookup_identical(self, shared_matrix):
        m, view = shared_matrix
        rng = np.random.default_rng(1)
        for _ in range(60):
            offs = np.sort(rng.choice(m.shape[0], size=4, replace=False)).astype(np.int64)
            for bound in (np.inf, 10.0, 1.0):
                for inclusive in (False, True):
                    a = ext.extent_sq_lookup(m, offs, bound, inclusive)
                    b = _purepy.extent_sq_lookup(m, offs, bound, inclusive)
                    assert a == b or (math.isinf(a) and math.isinf(b))

    def test_approx_scan_identical(self, shared_matrix):
        m, view = shared_matrix
        gap = series.exclusion_gap(view.l)
        for k in (2, 3, 5, 8):
            a_best, a_d, a_ex, a_pr = ext.approx_scan(m, gap, k, np.inf, None)
            b_best, b_d, b_ex, b_pr = _purepy.approx_scan(m, gap, k, np.inf, None)
            assert a_d == b_d
            assert (a_ex, a_pr) == (b_ex, b_pr)
            assert np.array_equal(np.asarray(a_best), np.asarray(b_best))

    def test_exact_dfs_identical(self, shared_matrix):
        m, view = shared_matrix
        gap = series.exclusion_gap(view.l)
        k = 4
        seed_best, seed_d, _, _ = ext.approx_scan(m, gap, k, np.inf, None)
        for query in (0, 37, 120):
            row = m[query]
            js = np.flatnonzero(row <= seed_d)
            js = js[js > query + gap]
            order = np.lexsort((js, row[js]))
            cand = np.ascontiguousarray(js[order], dtype=np.int64)
            a = ext.exact_dfs(m, query, cand, k, gap, float(seed_d), seed_best)
            b = _purepy.exact_dfs(m, query, cand, k, gap, float(seed_d), seed_best)
            assert a[0] == b[0]
            assert tuple(a[1]) == tuple(b[1])
            assert a[2:] == b[2:]


class TestIntegratedParity:
    def test_full_search_matches_across_backends(self, tmp_path):
        path = tmp_path / "walk.csv"
        io.write_series(path, random_walk(11, 600))
        docs = {}
        for backend in ("ext", "python"):
            env = dict(os.environ, MOTIFSET_BACKEND=backend)
            proc = subprocess.run(
                [
                    sys.executable,
                    "-m",
                    "motifset.cli",
                    "discover",
                    str(path),
                    "-l",
                    "30",
                    "-k",
                    "5",
                    "--mode",
                    "exact",
                ],
                capture_output=True,
                text=True,
                env=env,
            )
            assert proc.returncode == 0, proc.stderr
            docs[backend] = json.loads(proc.stdout)
        assert docs["ext"]["backend"] == "ext"
        assert docs["python"]["backend"] == "python"
        a, b = docs["ext"]["motiflet"], docs["python"]["motiflet"]
        assert a["offsets"] == b["offsets"]
        assert a["extent"] == pytest.approx(b["extent"], rel=1e-9)

    def test_unknown_backend_refuses_to_import(self):
        proc = subprocess.run(
            [sys.executable, "-c", "import motifset"],
            capture_output=True,
            text=True,
            env=dict(os.environ, MOTIFSET_BACKEND="bogus"),
        )
        assert proc.returncode != 0
        assert "MOTIFSET_BACKEND" in proc.stderr
