"""Counterfactual quality metrics, the nearest-unlike-neighbor baseline, and
the per-instance evaluation report."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .descriptors import max_gradient
from .nsga3 import CfeArchive
from .objectives import TargetSpec
from .series import Dataset, LabeledSeries, TimeSeries
from .signal_ops import dft_magnitudes, dtw


@dataclass
class EvalReport:
    validity: float | None
    plausibility: float | None
    proximity: float | None
    temporal_sparsity_segments: float | None  # mean edited-segment count
    temporal_sparsity_fraction: float | None  # mean fraction of differing samples
    frequency_sparsity: float | None          # nats
    max_gradient: float | None
    diversity: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    CSV_HEADER = ("validity,plausibility,proximity,temporal_sparsity_segments,"
                  "temporal_sparsity_fraction,frequency_sparsity,max_gradient,"
                  "diversity")

    def csv_row(self) -> str:
        def fmt(v):
            return "" if v is None else repr(float(v))
        return ",".join([
            fmt(self.validity), fmt(self.plausibility), fmt(self.proximity),
            fmt(self.temporal_sparsity_segments),
            fmt(self.temporal_sparsity_fraction),
            fmt(self.frequency_sparsity), fmt(self.max_gradient),
            str(self.diversity),
        ])


def validity(preds, target: TargetSpec) -> float:
    preds = np.asarray(preds, dtype=np.float64)
    if preds.size == 0:
        raise ValueError("validity of empty prediction set")
    return float(np.mean(np.abs(preds - target.label) <= target.tolerance))


def plausibility(xp: TimeSeries, yhat: float, train: Dataset, k: int = 5,
                 delta: float = 5.0, band: int | None = None) -> float:
    """Fraction of the k DTW-nearest training series whose labels lie within
    ``delta`` of the candidate's predicted value."""
    if not (1 <= k <= len(train)):
        raise ValueError(f"k must lie in [1, {len(train)}], got {k}")
    dists = np.array([dtw(xp, it.series, band) for it in train])
    order = np.argsort(dists, kind="stable")[:k]
    labels = train.labels[order]
    return float(np.mean(np.abs(labels - yhat) <= delta))


def proximity(x: TimeSeries, xp: TimeSeries, band: int | None = None) -> float:
    """DTW alignment cost normalized by the query length."""
    if len(x) != len(xp):
        raise ValueError("proximity expects equal-length series")
    return dtw(x, xp, band) / len(x)


def _diff_mask(x: TimeSeries, xp: TimeSeries, atol: float) -> np.ndarray:
    if len(x) != len(xp):
        raise ValueError("temporal sparsity expects equal-length series")
    return np.abs(x.values - xp.values) > atol


def temporal_sparsity(x: TimeSeries, xp: TimeSeries, atol: float = 1e-9) -> int:
    """Number of edited segments: rising edges of the difference mask (with an
    implicit leading zero)."""
    mask = _diff_mask(x, xp, atol).astype(np.int8)
    padded = np.concatenate(([0], mask))
    return int(np.sum(np.diff(padded) == 1))


def temporal_sparsity_fraction(x: TimeSeries, xp: TimeSeries,
                               atol: float = 1e-9) -> float:
    """Fraction of samples that differ; companion statistic to the segment
    count."""
    return float(np.mean(_diff_mask(x, xp, atol)))


def kl_divergence(p, q) -> float:
    """Discrete KL divergence sum p log(p/q), natural log (nats)."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    return float(np.sum(p * np.log(p / q)))


def frequency_sparsity(x: TimeSeries, xp: TimeSeries, n_bins: int = 50,
                       eps: float = 1e-10) -> float:
    """KL divergence (nats) between the magnitude-level histograms of the two
    one-sided spectra, binned over their combined magnitude range."""
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    mx = dft_magnitudes(x).magnitudes
    mxp = dft_magnitudes(xp).magnitudes
    lo = min(mx.min(), mxp.min())
    hi = max(mx.max(), mxp.max())
    if hi <= lo:
        return 0.0
    edges = np.linspace(lo, hi, n_bins + 1)
    hx, _ = np.histogram(mx, bins=edges)
    hxp, _ = np.histogram(mxp, bins=edges)
    px = hx.astype(np.float64) + eps
    pxp = hxp.astype(np.float64) + eps
    return kl_divergence(px / px.sum(), pxp / pxp.sum())


class NunNotFoundError(LookupError):
    """No training instance has a label inside the target interval."""


def nun_baseline(x: TimeSeries, target: TargetSpec, train: Dataset,
                 band: int | None = None) -> LabeledSeries:
    """Among training instances whose ground-truth label lies in the target
    interval, return the DTW-nearest to x (index tie-break)."""
    lo, hi = target.interval
    candidates = [(i, it) for i, it in enumerate(train) if lo <= it.label <= hi]
    if not candidates:
        raise NunNotFoundError(
            f"no training label in [{lo}, {hi}] for target {target.label}"
        )
    best = None
    best_dist = np.inf
    for i, it in candidates:
        d = dtw(x, it.series, band)
        if d < best_dist:
            best, best_dist = it, d
    return best


def evaluate_cfe_set(x: TimeSeries, target: TargetSpec, archive: CfeArchive,
                     train: Dataset, regressor, k: int = 5,
                     n_bins: int = 50, atol: float = 1e-9,
                     band: int | None = None) -> EvalReport:
    """Aggregate the desiderata metrics over an archive of counterfactuals."""
    members = archive.all_feasible
    if not members:
        return EvalReport(None, None, None, None, None, None, None, diversity=0)
    preds = np.array([regressor.predict(c.waveform) for c in members])
    return EvalReport(
        validity=validity(preds, target),
        plausibility=float(np.mean([
            plausibility(c.waveform, p, train, k, target.tolerance, band)
            for c, p in zip(members, preds)
        ])),
        proximity=float(np.mean([proximity(x, c.waveform, band) for c in members])),
        temporal_sparsity_segments=float(np.mean([
            temporal_sparsity(x, c.waveform, atol) for c in members
        ])),
        temporal_sparsity_fraction=float(np.mean([
            temporal_sparsity_fraction(x, c.waveform, atol) for c in members
        ])),
        frequency_sparsity=float(np.mean([
            frequency_sparsity(x, c.waveform, n_bins) for c in members
        ])),
        max_gradient=float(np.mean([
            max_gradient(c.waveform, scale_by_dt=False) for c in members
        ])),
        diversity=len(members),
    )
