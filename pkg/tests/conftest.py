"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from motifset import distances, series


def random_walk(seed, n, step=1.0):
    rng = np.random.default_rng(seed)
    return np.cumsum(rng.standard_normal(n) * step)


def make_source(values, l, policy=distances.POLICY_AUTO):
    view = series.make_series_view(np.asarray(values, dtype=np.float64), l)
    return distances.compute_distance_source(view, policy=policy)


def adversarial_ring(r=1.0, eps=1e-3):
    """Distance matrix on which the one-pass scan is a factor ~2 off for k=3.

    Eight "ring" nodes 0..7: adjacent pairs sit at distance r, all other ring
    pairs at 2r, so every ring node's two nearest neighbors are mutually far.
    Node 8 sits at r + eps from ring nodes 0 and 1 (the only set with extent
    below 2r is {0, 1, 8}), but its own two nearest neighbors are the decoys
    9 and 10 at distance r, again mutually 2r apart.  Every greedy candidate
    set therefore has extent exactly 2r, while the true optimum is r + eps.
    """
    n = 11
    m = np.full((n, n), 2.0 * r)
    for i in range(8):
        j = (i + 1) % 8
        m[i, j] = m[j, i] = r
    m[8, 0] = m[0, 8] = r + eps
    m[8, 1] = m[1, 8] = r + eps
    m[8, 9] = m[9, 8] = r
    m[8, 10] = m[10, 8] = r
    np.fill_diagonal(m, 0.0)
    return m


@pytest.fixture(scope="session")
def walk_300():
    return random_walk(7, 300)


@pytest.fixture(scope="session")
def source_300_l20(walk_300):
    return make_source(walk_300, 20)


def pytest_configure(config):
    try:
        from hypothesis import HealthCheck, settings
    except ImportError:
        return
    settings.register_profile(
        "motifset",
        deadline=None,
        suppress_health_check=[HealthCheck.too_slow],
    )
    settings.load_profile("motifset")
