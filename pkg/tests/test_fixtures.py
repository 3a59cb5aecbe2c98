"""Synthetic series generators and their ground truth."""

import numpy as np
import pytest

from motifset import errors, series
from motifset.fixtures import FIXTURE_KINDS, generate_fixture
from tests.conftest import make_source


class TestDeterminism:
    @pytest.mark.parametrize("kind", FIXTURE_KINDS)
    def test_same_seed_same_series(self, kind):
        a = generate_fixture(kind, seed=11)
        b = generate_fixture(kind, seed=11)
        assert np.array_equal(a.values, b.values)
        assert a.ground_truth == b.ground_truth

    @pytest.mark.parametrize("kind", FIXTURE_KINDS)
    def test_different_seed_differs(self, kind):
        # the noiseless sine is seed-free; give it jitter so seeds matter
        params = {"noise": 0.1} if kind == "sine" else {}
        a = generate_fixture(kind, seed=1, **params)
        b = generate_fixture(kind, seed=2, **params)
        assert not np.array_equal(a.values, b.values)


class TestPlanted:
    def test_shape_and_truth(self):
        fx = generate_fixture("planted-motif", seed=0)
        truth = fx.ground_truth
        assert fx.values.size == fx.params["n"]
        assert len(truth["offsets"]) == truth["k"] == fx.params["copies"]
        l = truth["motif_length"]
        offs = list(truth["offsets"])
        for a, b in zip(offs, offs[1:]):
            assert b - a > series.exclusion_gap(l)

    def test_copies_resemble_each_other(self):
        fx = generate_fixture("planted-motif", seed=4)
        l = fx.ground_truth["motif_length"]
        src = make_source(fx.values, l)
        offs = list(fx.ground_truth["offsets"])
        planted = max(
            np.sqrt(src.pair_sq(a, b)) for a in offs for b in offs if a < b
        )
        rng = np.random.default_rng(0)
        others = []
        for _ in range(200):
            i, j = rng.integers(0, src.n, size=2)
            if abs(int(i) - int(j)) > src.gap:
                others.append(np.sqrt(src.pair_sq(int(i), int(j))))
        assert planted < 0.5 * float(np.median(others))

    def test_custom_params(self):
        fx = generate_fixture(
            "planted-motif", seed=0, n=900, motif_length=40, copies=4
        )
        assert fx.values.size == 900
        assert len(fx.ground_truth["offsets"]) == 4

    def test_too_many_copies_for_n(self):
        with pytest.raises(errors.ParameterError):
            generate_fixture("planted-motif", seed=0, n=300, motif_length=100, copies=8)


class TestTwoMotif:
    def test_truth_layout(self):
        fx = generate_fixture("two-motif", seed=0)
        truth = fx.ground_truth
        p = truth["motif_length"]
        calib = list(truth["calibration_offsets"])
        beats = list(truth["beat_offsets"])
        assert len(calib) == fx.params["calibration_copies"]
        assert len(beats) == fx.params["beat_copies"]
        assert truth["expected_elbows"] == (
            fx.params["calibration_copies"],
            fx.params["beat_copies"],
        ) or list(truth["expected_elbows"]) == [
            fx.params["calibration_copies"],
            fx.params["beat_copies"],
        ]
        assert max(calib) + p <= min(beats)

    def test_calibration_copies_are_identical(self):
        fx = generate_fixture("two-motif", seed=0)
        p = fx.ground_truth["motif_length"]
        calib = list(fx.ground_truth["calibration_offsets"])
        w0 = fx.values[calib[0] : calib[0] + p]
        for off in calib[1:]:
            assert np.array_equal(w0, fx.values[off : off + p])


class TestOtherKinds:
    def test_sine_period(self):
        fx = generate_fixture("sine", seed=0, n=500, period=50, noise=0.0)
        assert fx.ground_truth["period"] == 50
        assert np.max(np.abs(fx.values[:450] - fx.values[50:])) <= 1e-12

    def test_random_walk_is_cumulative(self):
        fx = generate_fixture("random-walk", seed=9, n=250)
        steps = np.diff(fx.values)
        assert fx.values.size == 250
        assert np.std(steps) == pytest.approx(1.0, rel=0.2)


class TestValidation:
    def test_unknown_kind(self):
        with pytest.raises(errors.ParameterError):
            generate_fixture("chirp", seed=0)

    def test_unknown_param(self):
        with pytest.raises(errors.ParameterError):
            generate_fixture("sine", seed=0, wavelength=3)

    def test_int_params_enforced(self):
        with pytest.raises(errors.ParameterError):
            generate_fixture("planted-motif", seed=0, copies=3.5)
