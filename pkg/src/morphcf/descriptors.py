"""The five-element morphology property profile of a signal."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import TimeSeries
from .signal_ops import dft_magnitudes, percentile


@dataclass(frozen=True)
class PropertyProfile:
    amplitude: float          # signal units, Q95 - Q5
    dominant_freq_hz: float   # Hz
    plateau_frac: float       # fraction of samples at/above the Q60 threshold
    trend_slope: float        # signal units per sample (OLS)
    max_gradient: float       # signal units per second

    def as_array(self) -> np.ndarray:
        return np.array([
            self.amplitude,
            self.dominant_freq_hz,
            self.plateau_frac,
            self.trend_slope,
            self.max_gradient,
        ])


DESCRIPTOR_NAMES = ("amplitude", "dominant_freq_hz", "plateau_frac",
                    "trend_slope", "max_gradient")


def amplitude(x: TimeSeries) -> float:
    return percentile(x.values, 95) - percentile(x.values, 5)


def dominant_frequency(x: TimeSeries, mean_center: bool = True) -> float:
    """Frequency of the largest spectral magnitude over bins 0..floor(T/2)-1
    (Nyquist bin excluded); ties break toward the lowest bin. The signal is
    demeaned by default so a nonzero baseline cannot dominate the argmax."""
    spec = dft_magnitudes(x, mean_center=mean_center)
    mags = spec.magnitudes[: len(x) // 2]
    k_star = int(np.argmax(mags))  # argmax returns the first (lowest) maximizer
    return float(spec.bin_freqs_hz[k_star])


def plateau_fraction(x: TimeSeries) -> float:
    theta = percentile(x.values, 60)
    return float(np.mean(x.values >= theta))


def trend_slope(x: TimeSeries) -> float:
    T = len(x)
    t = np.arange(T, dtype=np.float64)
    t_bar = (T - 1) / 2.0
    x_bar = x.values.mean()
    return float(((t - t_bar) @ (x.values - x_bar)) / ((t - t_bar) @ (t - t_bar)))


def max_gradient(x: TimeSeries, scale_by_dt: bool = True) -> float:
    """Q95 of absolute first differences. With ``scale_by_dt`` the result is
    in signal units per second (the descriptor); without it, raw |dx| (the
    smoothness objective)."""
    diffs = np.abs(np.diff(x.values))
    q = percentile(diffs, 95)
    return q * x.sample_rate_hz if scale_by_dt else q


def profile(x: TimeSeries) -> PropertyProfile:
    return PropertyProfile(
        amplitude=amplitude(x),
        dominant_freq_hz=dominant_frequency(x),
        plateau_frac=plateau_fraction(x),
        trend_slope=trend_slope(x),
        max_gradient=max_gradient(x),
    )
