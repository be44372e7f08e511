"""Tests for GKP primitives: binning, channel sampling, likelihoods."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkptrack.gkp import (
    HALF_SQRT_PI,
    P_CORR_ZERO_SIGMA,
    SQRT_PI,
    BinnedOutcome,
    NoiseParams,
    analog_likelihoods,
    bin_measurement,
    digital_likelihoods,
    log_gauss,
    p_corr,
    sample_channel,
    true_flip,
)


def gaussian_mass_simpson(sigma: float, lo: float, hi: float, n: int = 200_001) -> float:
    """Quadrature oracle for the central-bin mass, independent of erf."""
    x = np.linspace(lo, hi, n)
    y = np.exp(-(x**2) / (2 * sigma * sigma)) / math.sqrt(2 * math.pi * sigma * sigma)
    h = (hi - lo) / (n - 1)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(h / 3.0 * np.sum(w * y))


class TestSampleChannel:
    def test_zero_sigma_exact(self):
        rng = np.random.default_rng(0)
        assert sample_channel(0.0, rng) == 0.0

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            sample_channel(-0.1, np.random.default_rng(0))

    def test_moments(self):
        rng = np.random.default_rng(1234)
        n = 1_000_000
        draws = np.array([sample_channel(0.5, rng) for _ in range(n)])
        assert abs(draws.mean()) < 4 * (0.5 / math.sqrt(n))
        assert abs(draws.var() - 0.25) < 0.005 * 0.25


class TestBinning:
    @pytest.mark.parametrize(
        "q, bit, dev",
        [
            (0.0, 0, 0.0),
            (SQRT_PI, 1, 0.0),
            (-0.6 * SQRT_PI, 1, 0.4 * SQRT_PI),
            (2 * SQRT_PI + 0.3, 0, 0.3),
        ],
    )
    def test_examples(self, q, bit, dev):
        out = bin_measurement(q)
        assert out.bit == bit
        assert out.deviation == pytest.approx(dev, abs=1e-12)

    def test_half_bin_tie_goes_down(self):
        # an exactly representable half-bin value stays with the lower point
        out = bin_measurement(HALF_SQRT_PI)
        assert out == BinnedOutcome(bit=0, deviation=HALF_SQRT_PI)
        out = bin_measurement(-HALF_SQRT_PI)
        assert out.bit == 1
        assert out.deviation == pytest.approx(HALF_SQRT_PI)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            bin_measurement(float("nan"))
        with pytest.raises(ValueError):
            bin_measurement(float("inf"))

    @given(st.integers(-50, 50), st.floats(-0.499, 0.499))
    def test_idempotence(self, k, frac):
        d = frac * SQRT_PI
        out = bin_measurement(k * SQRT_PI + d)
        assert out.deviation == pytest.approx(d, abs=1e-9)
        assert out.bit == k % 2

    @given(st.floats(-20.0, 20.0))
    def test_consistency_with_true_flip(self, delta):
        # measured bit equals the hidden flip when the reference bit is 0
        assert bin_measurement(delta).bit == true_flip(delta)

    def test_deviation_range(self):
        rng = np.random.default_rng(7)
        for q in rng.normal(0, 3.0, 2000):
            d = bin_measurement(float(q)).deviation
            assert -HALF_SQRT_PI < d <= HALF_SQRT_PI


class TestTrueFlip:
    @pytest.mark.parametrize(
        "delta, flip",
        [(0.0, 0), (0.9 * SQRT_PI, 1), (2.1 * SQRT_PI, 0), (-1.2 * SQRT_PI, 1)],
    )
    def test_examples(self, delta, flip):
        assert true_flip(delta) == flip


class TestPCorr:
    def test_against_quadrature_oracle(self):
        for sigma in (0.3, 0.5, 0.555, 0.607, 0.05):
            oracle = gaussian_mass_simpson(sigma, -HALF_SQRT_PI, HALF_SQRT_PI)
            assert p_corr(sigma) == pytest.approx(oracle, abs=1e-9)

    def test_small_sigma_near_one(self):
        assert 1.0 - p_corr(0.05) < 1e-6

    def test_paper_operating_points(self):
        # misidentification rates at the two reference noise levels
        assert 1.0 - p_corr(0.555) == pytest.approx(0.1103, abs=2e-4)
        assert 1.0 - p_corr(0.607) == pytest.approx(0.1443, abs=2e-4)

    def test_rejects_nonpositive(self):
        for bad in (0.0, -1.0):
            with pytest.raises(ValueError):
                p_corr(bad)
        assert P_CORR_ZERO_SIGMA == 1.0

    def test_strictly_decreasing(self):
        # strict everywhere the value has not saturated to 1.0 in doubles
        sigmas = np.linspace(0.05, 2.0, 100)
        values = [p_corr(float(s)) for s in sigmas]
        for a, b in zip(values, values[1:]):
            assert a >= b
            if a < 1.0:
                assert a > b

    @pytest.mark.parametrize("sigma", [0.3, 0.555, 0.607])
    def test_monte_carlo_agreement(self, sigma):
        rng = np.random.default_rng(99)
        n = 1_000_000
        draws = rng.normal(0.0, sigma, n)
        frac = float(np.mean(np.abs(draws) < HALF_SQRT_PI))
        se = math.sqrt(frac * (1 - frac) / n)
        assert abs(frac - p_corr(sigma)) < 4 * se


class TestLikelihoods:
    def test_analog_at_mode(self):
        lp = analog_likelihoods(0.0, 0.4)
        assert lp.l_match == pytest.approx(math.log(1.0 / math.sqrt(2 * math.pi * 0.16)))
        assert lp.l_flip == pytest.approx(log_gauss(SQRT_PI, 0.4))

    def test_analog_symmetry_point(self):
        lp = analog_likelihoods(HALF_SQRT_PI, 0.5)
        assert lp.l_match == lp.l_flip

    def test_analog_ratio_against_density_oracle(self):
        lp = analog_likelihoods(0.3, 0.5)

        def density(x):
            return math.exp(-(x * x) / (2 * 0.25)) / math.sqrt(2 * math.pi * 0.25)

        ratio = math.exp(lp.l_match) / math.exp(lp.l_flip)
        assert ratio == pytest.approx(density(0.3) / density(SQRT_PI - 0.3), rel=1e-12)

    @given(st.floats(-0.886, 0.886))
    def test_analog_sign_symmetry(self, d):
        assert analog_likelihoods(d, 0.5) == analog_likelihoods(-d, 0.5)

    def test_analog_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            analog_likelihoods(SQRT_PI, 0.5)

    def test_digital_matches_p_corr(self):
        for sigma in (0.555, 0.607):
            lp = digital_likelihoods(sigma)
            assert lp.l_match == pytest.approx(math.log(p_corr(sigma)))
            assert lp.l_flip == pytest.approx(math.log(1 - p_corr(sigma)))

    def test_digital_small_sigma_flip_diverges(self):
        assert digital_likelihoods(0.08).l_flip < -50


class TestNoiseParams:
    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            NoiseParams(sigma_channel=-0.1)
        with pytest.raises(ValueError):
            NoiseParams(sigma_channel=0.1, sigma_ancilla_q=-1)

    def test_defaults(self):
        np_ = NoiseParams(sigma_channel=0.5)
        assert np_.sigma_ancilla_q == 0.0 and np_.sigma_ancilla_p == 0.0


settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")
