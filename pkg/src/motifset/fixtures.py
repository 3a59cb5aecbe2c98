"""Synthetic series with structure known by construction.

Each generator returns a Fixture carrying the series, the parameters used,
and a ground_truth dict describing what a correct analysis should find
(planted offsets, natural set sizes, elbow positions).  Generation is
deterministic in (kind, seed, params).

Kinds
-----
planted-motif
    Gaussian background with `copies` implantations of one smooth template.
    Copies drift linearly along a fixed unit-energy direction, so the best
    k-set extent grows smoothly with k up to `copies` and jumps sharply
    after; the elbow structure is {copies} by design.
two-motif
    A block of exact square-wave repeats (pairwise distance 0) followed by a
    block of drift-graded spike repeats.  Two natural set sizes, so two
    elbows: {calibration_copies, beat_copies}.
random-walk
    Gaussian random walk; no planted structure.
sine
    A plain sinusoid, optionally noisy; every window repeats one period
    apart.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

PLANTED = "planted-motif"
TWO_MOTIF = "two-motif"
RANDOM_WALK = "random-walk"
SINE = "sine"
FIXTURE_KINDS = (PLANTED, TWO_MOTIF, RANDOM_WALK, SINE)

_DEFAULTS = {
    PLANTED: {
        "n": 2000,
        "motif_length": 100,
        "copies": 8,
        "drift": 0.3,
        "noise": 0.05,
        "background": 0.35,
    },
    TWO_MOTIF: {
        "period": 64,
        "calibration_copies": 6,
        "beat_copies": 16,
        "beat_drift": 0.08,
        "background": 0.4,
    },
    RANDOM_WALK: {
        "n": 1000,
        "step": 1.0,
    },
    SINE: {
        "n": 1000,
        "period": 100,
        "amplitude": 1.0,
        "noise": 0.0,
    },
}

_INT_PARAMS = {"n", "motif_length", "copies", "period", "calibration_copies",
               "beat_copies"}


@dataclass(frozen=True)
class Fixture:
    """A generated series plus everything a test needs to judge results."""

    kind: str
    seed: int
    params: dict
    values: np.ndarray
    ground_truth: dict


def _resolve_params(kind, params):
    defaults = _DEFAULTS[kind]
    unknown = sorted(set(params) - set(defaults))
    if unknown:
        raise ParameterError(
            f"unknown parameter(s) {unknown} for fixture {kind!r}; "
            f"valid: {sorted(defaults)}"
        )
    merged = dict(defaults)
    merged.update(params)
    for key, value in merged.items():
        if key in _INT_PARAMS:
            if float(value) != int(value):
                raise ParameterError(f"{key} must be an integer, got {value!r}")
            merged[key] = int(value)
            if merged[key] < 1:
                raise ParameterError(f"{key} must be >= 1, got {merged[key]}")
        else:
            merged[key] = float(value)
            if merged[key] < 0:
                raise ParameterError(f"{key} must be >= 0, got {merged[key]}")
    return merged


def _smooth_template(l):
    """Asymmetric double-bump shape, zero mean, unit std."""
    t = np.linspace(0.0, 1.0, l, endpoint=False)
    shape = (np.exp(-0.5 * ((t - 0.28) / 0.09) ** 2)
             - 0.62 * np.exp(-0.5 * ((t - 0.62) / 0.15) ** 2))
    shape -= shape.mean()
    return shape / shape.std()


def _drift_direction(l):
    """Unit-energy direction whose energy is spread across the window.

    A mix of incommensurate oscillations, so every sub-window carries a
    proportional share of the drift; this keeps the graded structure visible
    at window lengths shorter than the template.
    """
    t = np.linspace(0.0, 1.0, l, endpoint=False)
    d = np.cos(2.0 * np.pi * 2.3 * t) + 0.6 * np.sin(2.0 * np.pi * 5.1 * t)
    d -= d.mean()
    return d / np.linalg.norm(d)


def _planted(rng, p):
    n, l, copies = p["n"], p["motif_length"], p["copies"]
    period = l + l // 2
    margin = l
    needed = 2 * margin + (copies - 1) * period + l
    if n < needed:
        raise ParameterError(
            f"n={n} too small for {copies} copies of length {l}; need >= {needed}"
        )
    values = p["background"] * rng.standard_normal(n)
    template = _smooth_template(l)
    direction = _drift_direction(l)
    offsets = []
    center = (copies - 1) / 2.0
    for j in range(copies):
        off = margin + j * period
        offsets.append(off)
        copy = (template
                + p["drift"] * (j - center) * direction
                + p["noise"] * rng.standard_normal(l))
        values[off : off + l] = copy
    truth = {
        "motif_length": l,
        "offsets": offsets,
        "k": copies,
        "expected_elbows": [copies],
    }
    return values, truth


def _square_period(period):
    half = period // 2
    unit = np.empty(period)
    unit[:half] = 1.0
    unit[half:] = -1.0
    return unit


def _spike_shape(period):
    t = np.linspace(0.0, 1.0, period, endpoint=False)
    shape = (np.exp(-0.5 * ((t - 0.30) / 0.06) ** 2)
             - 0.25 * np.exp(-0.5 * ((t - 0.55) / 0.12) ** 2))
    shape -= shape.mean()
    return shape / shape.std()


def _two_motif(rng, p):
    period = p["period"]
    if period < 8:
        raise ParameterError(f"period must be >= 8, got {period}")
    nc, nb = p["calibration_copies"], p["beat_copies"]
    margin = period
    gap = period
    n = 2 * margin + nc * period + gap + nb * period
    values = p["background"] * rng.standard_normal(n)

    calib_start = margin
    values[calib_start : calib_start + nc * period] = np.tile(_square_period(period), nc)
    calib_offsets = [calib_start + j * period for j in range(nc)]

    beat_start = margin + nc * period + gap
    shape = _spike_shape(period)
    direction = np.gradient(shape)
    direction /= np.linalg.norm(direction)
    center = (nb - 1) / 2.0
    beat_offsets = []
    for j in range(nb):
        off = beat_start + j * period
        beat_offsets.append(off)
        values[off : off + period] = shape + p["beat_drift"] * (j - center) * direction

    truth = {
        "motif_length": period,
        "calibration_offsets": calib_offsets,
        "beat_offsets": beat_offsets,
        "expected_elbows": sorted([nc, nb]),
    }
    return values, truth


def _random_walk(rng, p):
    values = np.cumsum(p["step"] * rng.standard_normal(p["n"]))
    return values, {}


def _sine(rng, p):
    n, period = p["n"], p["period"]
    t = np.arange(n, dtype=np.float64)
    values = p["amplitude"] * np.sin(2.0 * np.pi * t / period)
    if p["noise"] > 0:
        values = values + p["noise"] * rng.standard_normal(n)
    return values, {"period": period}


_BUILDERS = {
    PLANTED: _planted,
    TWO_MOTIF: _two_motif,
    RANDOM_WALK: _random_walk,
    SINE: _sine,
}


def generate_fixture(kind, seed=0, **params):
    """Generate one fixture.

    Parameters
    ----------
    kind : str
        One of FIXTURE_KINDS.
    seed : int
        Seed for the underlying generator; same inputs, same series.
    params
        Kind-specific overrides; unknown names are rejected.
    """
    if kind not in _BUILDERS:
        raise ParameterError(
            f"unknown fixture kind {kind!r}; valid: {list(FIXTURE_KINDS)}"
        )
    merged = _resolve_params(kind, params)
    rng = np.random.default_rng(int(seed))
    values, truth = _BUILDERS[kind](rng, merged)
    return Fixture(kind=kind, seed=int(seed), params=merged,
                   values=values, ground_truth=truth)
