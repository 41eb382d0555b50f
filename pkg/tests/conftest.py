import numpy as np
import pytest

from morphcf.series import TimeSeries


@pytest.fixture
def fs125():
    return 125.0


def make_series(values, fs=125.0):
    return TimeSeries(np.asarray(values, dtype=np.float64), fs)


@pytest.fixture
def sine_bin40():
    """Integer-periodic sine concentrating in DFT bin 40: T=1000, f_s=125,
    so the peak sits at 5.0 Hz."""
    t = np.arange(1000)
    return make_series(np.sin(2 * np.pi * 40 * t / 1000))
