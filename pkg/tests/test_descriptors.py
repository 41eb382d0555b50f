import numpy as np
import pytest

from morphcf.descriptors import (DESCRIPTOR_NAMES, amplitude,
                                 dominant_frequency, max_gradient,
                                 plateau_fraction, profile, trend_slope)

from conftest import make_series


class TestAmplitude:
    def test_ramp(self):
        # Q95 of [0..99] is 94.05, Q5 is 4.95
        assert amplitude(make_series(np.arange(100.0))) == pytest.approx(89.1)

    def test_constant_is_zero(self):
        assert amplitude(make_series(np.full(50, 7.0))) == 0.0

    def test_shift_invariant(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            v = rng.normal(size=rng.integers(10, 200))
            c = rng.normal()
            assert amplitude(make_series(v + c)) == pytest.approx(
                amplitude(make_series(v)), abs=1e-9)

    def test_scale_equivariant(self):
        rng = np.random.default_rng(1)
        v = rng.normal(size=80)
        assert amplitude(make_series(3.0 * v)) == pytest.approx(
            3.0 * amplitude(make_series(v)), abs=1e-9)


class TestDominantFrequency:
    def test_sine_peak(self, sine_bin40):
        assert dominant_frequency(sine_bin40) == pytest.approx(5.0)

    def test_constant_is_dc(self):
        # demeaned constant has an all-zero spectrum; tie breaks to bin 0
        assert dominant_frequency(make_series(np.full(64, 4.0))) == 0.0

    def test_offset_does_not_dominate(self, sine_bin40):
        shifted = sine_bin40.with_values(sine_bin40.values + 100.0)
        assert dominant_frequency(shifted) == pytest.approx(5.0)

    def test_without_demean_offset_wins(self, sine_bin40):
        shifted = sine_bin40.with_values(sine_bin40.values + 100.0)
        assert dominant_frequency(shifted, mean_center=False) == 0.0

    def test_lowest_bin_tie_break(self):
        # equal-amplitude sines in bins 3 and 7 of a 100-sample frame
        t = np.arange(100)
        v = np.sin(2 * np.pi * 3 * t / 100) + np.sin(2 * np.pi * 7 * t / 100)
        s = make_series(v, fs=100.0)
        assert dominant_frequency(s) == pytest.approx(3.0)

    def test_reversal_invariant(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            v = rng.normal(size=rng.integers(10, 150))
            a = dominant_frequency(make_series(v))
            b = dominant_frequency(make_series(v[::-1].copy()))
            assert a == pytest.approx(b, abs=1e-9)


class TestPlateauFraction:
    def test_step(self):
        # Q60 of [0,0,1,1] is 0.8; two samples >= 0.8
        assert plateau_fraction(make_series([0.0, 0.0, 1.0, 1.0])) == 0.5

    def test_constant_is_one(self):
        assert plateau_fraction(make_series(np.full(30, 2.0))) == 1.0

    def test_bounds(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            v = rng.normal(size=rng.integers(5, 100))
            f = plateau_fraction(make_series(v))
            assert 0.0 < f <= 1.0

    def test_shift_scale_invariant(self):
        rng = np.random.default_rng(4)
        v = rng.normal(size=60)
        base = plateau_fraction(make_series(v))
        assert plateau_fraction(make_series(2.5 * v + 7.0)) == pytest.approx(base)


class TestTrendSlope:
    def test_ramp(self):
        assert trend_slope(make_series(2.0 * np.arange(50))) == pytest.approx(2.0)

    def test_constant_is_zero(self):
        assert trend_slope(make_series(np.full(20, 5.0))) == pytest.approx(0.0, abs=1e-12)

    def test_shift_invariant(self):
        rng = np.random.default_rng(5)
        v = rng.normal(size=40)
        assert trend_slope(make_series(v + 100.0)) == pytest.approx(
            trend_slope(make_series(v)), abs=1e-9)

    def test_reversal_negates(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            v = rng.normal(size=rng.integers(5, 100))
            assert trend_slope(make_series(v[::-1].copy())) == pytest.approx(
                -trend_slope(make_series(v)), abs=1e-9)

    def test_matches_polyfit(self):
        rng = np.random.default_rng(7)
        v = rng.normal(size=77)
        ref = np.polyfit(np.arange(77.0), v, 1)[0]
        assert trend_slope(make_series(v)) == pytest.approx(ref)


class TestMaxGradient:
    def test_alternating(self):
        # |diff| all 1.0; Q95 = 1.0; times fs=125
        v = np.tile([0.0, 1.0], 10)
        assert max_gradient(make_series(v)) == pytest.approx(125.0)

    def test_raw_flag(self):
        v = np.tile([0.0, 1.0], 10)
        assert max_gradient(make_series(v), scale_by_dt=False) == pytest.approx(1.0)

    def test_constant_is_zero(self):
        assert max_gradient(make_series(np.full(10, 3.0))) == 0.0

    def test_shift_invariant(self):
        rng = np.random.default_rng(8)
        v = rng.normal(size=50)
        assert max_gradient(make_series(v + 42.0)) == pytest.approx(
            max_gradient(make_series(v)), abs=1e-9)


class TestProfile:
    def test_field_order_matches_names(self):
        p = profile(make_series(np.arange(100.0)))
        arr = p.as_array()
        assert arr.shape == (5,)
        assert list(DESCRIPTOR_NAMES) == ["amplitude", "dominant_freq_hz",
                                          "plateau_frac", "trend_slope",
                                          "max_gradient"]
        assert arr[0] == pytest.approx(89.1)
        assert arr[3] == pytest.approx(1.0)

    def test_consistent_with_components(self):
        rng = np.random.default_rng(9)
        s = make_series(rng.normal(size=120))
        p = profile(s)
        assert p.amplitude == amplitude(s)
        assert p.dominant_freq_hz == dominant_frequency(s)
        assert p.plateau_frac == plateau_fraction(s)
        assert p.trend_slope == trend_slope(s)
        assert p.max_gradient == max_gradient(s)
