"""Shared numerical kernels: percentiles, one-sided DFT, SSA, DTW."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .series import TimeSeries


def percentile(x, q: float) -> float:
    """Linear-interpolation percentile on sorted values."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValueError("percentile of empty sequence")
    if not (0.0 <= q <= 100.0):
        raise ValueError(f"q must lie in [0, 100], got {q}")
    return float(np.percentile(x, q, method="linear"))


@dataclass(frozen=True)
class Spectrum:
    """One-sided DFT grid: bin_freqs_hz[k] = k * f_s / T, k = 0..floor(T/2)."""

    bin_freqs_hz: np.ndarray
    magnitudes: np.ndarray


def dft_magnitudes(x: TimeSeries, mean_center: bool = False) -> Spectrum:
    """One-sided DFT magnitudes |X[k]| for k = 0..floor(T/2)."""
    values = x.values - x.values.mean() if mean_center else x.values
    mags = np.abs(np.fft.rfft(values))
    T = len(x)
    freqs = np.arange(mags.shape[0]) * (x.sample_rate_hz / T)
    return Spectrum(bin_freqs_hz=freqs, magnitudes=mags)


@dataclass(frozen=True)
class SsaConfig:
    window_len: int
    n_components: int = 2

    def validate(self, T: int) -> None:
        if not (2 <= self.window_len <= T // 2):
            raise ValueError(
                f"SSA window_len must lie in [2, T/2] = [2, {T // 2}], got {self.window_len}"
            )
        if self.n_components < 1:
            raise ValueError("n_components must be >= 1")


def default_ssa_config(T: int) -> SsaConfig:
    return SsaConfig(window_len=max(2, min(250, T // 4)), n_components=2)


def ssa_reconstruct(x: TimeSeries, cfg: SsaConfig) -> TimeSeries:
    """Classical SSA: Hankel trajectory matrix, SVD, reconstruction from the
    top singular triples via anti-diagonal averaging."""
    T = len(x)
    cfg.validate(T)
    L = cfg.window_len
    K = T - L + 1
    v = x.values
    # trajectory matrix, L x K
    traj = np.lib.stride_tricks.sliding_window_view(v, L).T
    try:
        u, s, vt = np.linalg.svd(traj, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"SSA SVD failed for series of length {T}: {exc}") from exc
    r = min(cfg.n_components, s.shape[0])
    approx = (u[:, :r] * s[:r]) @ vt[:r, :]
    # anti-diagonal (Hankel) averaging back to a length-T series
    recon = np.zeros(T)
    counts = np.zeros(T)
    for i in range(L):
        recon[i : i + K] += approx[i, :]
        counts[i : i + K] += 1.0
    return x.with_values(recon / counts)


@njit(cache=True)
def _dtw_cost(a, b, band):  # pragma: no cover - exercised through dtw()
    n, m = a.shape[0], b.shape[0]
    inf = np.inf
    prev = np.full(m + 1, inf)
    cur = np.full(m + 1, inf)
    prev[0] = 0.0
    for i in range(1, n + 1):
        cur[:] = inf
        if band < 0:
            lo, hi = 1, m
        else:
            lo = max(1, i - band)
            hi = min(m, i + band)
        for j in range(lo, hi + 1):
            cost = abs(a[i - 1] - b[j - 1])
            best = prev[j]
            if prev[j - 1] < best:
                best = prev[j - 1]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = cost + best
        prev, cur = cur, prev
    return prev[m]


def default_dtw_band(T: int) -> int | None:
    """Unconstrained up to 512 samples; 10% Sakoe-Chiba band above."""
    return None if T <= 512 else int(np.ceil(0.1 * T))


def dtw(a: TimeSeries | np.ndarray, b: TimeSeries | np.ndarray,
        band: int | None = None) -> float:
    """Minimal cumulative |a_i - b_j| alignment cost, standard
    match/insert/delete steps, optionally Sakoe-Chiba constrained."""
    av = a.values if isinstance(a, TimeSeries) else np.asarray(a, dtype=np.float64)
    bv = b.values if isinstance(b, TimeSeries) else np.asarray(b, dtype=np.float64)
    if av.size == 0 or bv.size == 0:
        raise ValueError("dtw inputs must be non-empty")
    if band is not None and band < abs(av.size - bv.size):
        raise ValueError(
            f"band {band} infeasible for lengths {av.size}, {bv.size}"
        )
    return float(_dtw_cost(av, bv, -1 if band is None else int(band)))
