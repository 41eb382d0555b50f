"""Epistemic-uncertainty probes: bootstrap interval widths, counterfactual
prediction dispersion, Gaussian-KDE negative log-likelihood, and the
per-target-bin summary report."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .descriptors import profile
from .nsga3 import CfeArchive
from .regressors import Ensemble, ensemble_predict_all
from .series import Dataset
from .signal_ops import percentile


def central_interval_width(preds, level: float = 0.95) -> float:
    preds = np.asarray(preds, dtype=np.float64)
    if preds.size < 2:
        raise ValueError("need at least 2 predictions")
    if not (0.0 < level < 1.0):
        raise ValueError(f"level must lie in (0, 1), got {level}")
    hi_q = (1.0 + level) / 2.0 * 100.0
    lo_q = (1.0 - level) / 2.0 * 100.0
    return percentile(preds, hi_q) - percentile(preds, lo_q)


@dataclass
class DispersionResult:
    mean: float | None
    ci_width: float | None
    variance: float | None


def cfe_dispersion(archive: CfeArchive, model) -> DispersionResult:
    """Pool the predictions of every ensemble member (or a single regressor)
    over every archive member; return mean, central-95% width, and population
    variance of the pooled predictions."""
    if len(archive) == 0:
        return DispersionResult(None, None, None)
    preds = []
    for cand in archive.all_feasible:
        if isinstance(model, Ensemble):
            preds.extend(ensemble_predict_all(model, cand.waveform))
        else:
            preds.append(model.predict(cand.waveform))
    preds = np.asarray(preds)
    width = central_interval_width(preds) if preds.size >= 2 else 0.0
    return DispersionResult(
        mean=float(preds.mean()),
        ci_width=float(width),
        variance=float(preds.var()),
    )


def kde_nll(train_features: np.ndarray, query: np.ndarray,
            bandwidth: float) -> float:
    """-log of the Gaussian-kernel mixture density at ``query``; features are
    expected already standardized."""
    train_features = np.atleast_2d(np.asarray(train_features, dtype=np.float64))
    if train_features.shape[0] == 0:
        raise ValueError("empty training feature set")
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    query = np.asarray(query, dtype=np.float64)
    d = train_features.shape[1]
    sq = np.sum((train_features - query) ** 2, axis=1) / (bandwidth ** 2)
    # log-mean-exp of the kernel log-densities, stabilized
    log_kernels = -0.5 * sq - d * np.log(bandwidth) - 0.5 * d * np.log(2 * np.pi)
    m = log_kernels.max()
    log_density = m + np.log(np.mean(np.exp(log_kernels - m)))
    return float(-log_density)


def scott_bandwidth(n: int, d: int) -> float:
    return float(n ** (-1.0 / (d + 4)))


class DescriptorKde:
    """Gaussian KDE on z-scored 5-feature morphology profiles of a training
    set; the density proxy for how well a query is supported by the data."""

    def __init__(self, train: Dataset, bandwidth: float | None = None):
        feats = np.stack([profile(it.series).as_array() for it in train])
        self._mean = feats.mean(axis=0)
        std = feats.std(axis=0)
        self._std = np.where(std > 0, std, 1.0)
        self._z = (feats - self._mean) / self._std
        self.bandwidth = bandwidth if bandwidth is not None else scott_bandwidth(
            feats.shape[0], feats.shape[1])

    def nll(self, series) -> float:
        q = (profile(series).as_array() - self._mean) / self._std
        return kde_nll(self._z, q, self.bandwidth)


@dataclass
class BinReport:
    lo: float
    hi: float
    n: int
    mean_label: float | None
    mean_bootstrap_ci_width: float | None
    mean_cfe_ci_width: float | None
    mean_kde_nll: float | None
    mean_cfe_variance: float | None

    CSV_HEADER = ("bin_lo,bin_hi,n,mean_label,mean_bootstrap_ci_width,"
                  "mean_cfe_ci_width,mean_kde_nll,mean_cfe_variance")

    def csv_row(self) -> str:
        def fmt(v):
            return "" if v is None else repr(float(v))
        return (f"{self.lo!r},{self.hi!r},{self.n},{fmt(self.mean_label)},"
                f"{fmt(self.mean_bootstrap_ci_width)},{fmt(self.mean_cfe_ci_width)},"
                f"{fmt(self.mean_kde_nll)},{fmt(self.mean_cfe_variance)}")


@dataclass
class InstanceUncertainty:
    """Per-test-instance raw statistics feeding the bin report."""

    label: float
    bootstrap_ci_width: float
    cfe_ci_width: float | None
    cfe_variance: float | None
    kde_nll: float


def bin_report(per_instance: list[InstanceUncertainty],
               bin_edges) -> list[BinReport]:
    """One report per [lo, hi) bin; instances assigned by ground-truth label,
    empty bins reported with n=0 and absent means."""
    edges = np.asarray(bin_edges, dtype=np.float64)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("bin edges must be strictly increasing with >= 2 entries")
    reports = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        members = [u for u in per_instance if lo <= u.label < hi]
        if not members:
            reports.append(BinReport(float(lo), float(hi), 0,
                                     None, None, None, None, None))
            continue

        def mean_of(attr):
            vals = [getattr(u, attr) for u in members if getattr(u, attr) is not None]
            return float(np.mean(vals)) if vals else None

        reports.append(BinReport(
            lo=float(lo), hi=float(hi), n=len(members),
            mean_label=mean_of("label"),
            mean_bootstrap_ci_width=mean_of("bootstrap_ci_width"),
            mean_cfe_ci_width=mean_of("cfe_ci_width"),
            mean_kde_nll=mean_of("kde_nll"),
            mean_cfe_variance=mean_of("cfe_variance"),
        ))
    return reports
