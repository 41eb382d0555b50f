"""Black-box regressors over waveforms and the bootstrap ensemble.

Every regressor exposes ``predict(series) -> float`` and is deterministic and
re-entrant; a heavyweight external model can be plugged in behind the same
signature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .descriptors import dominant_frequency, profile
from .series import Dataset, LabeledSeries, TimeSeries, train_test_split_bootstrap
from .signal_ops import dtw


def augment_with_reference(train: Dataset, refset) -> Dataset:
    """Union of the raw training set and its denoised reference counterpart
    (same labels). Feature-based regressors fit on this union stay calibrated
    on the denoised manifold the evolutionary search explores."""
    if len(refset.members) != len(train):
        raise ValueError("reference set and training set sizes differ")
    extra = [LabeledSeries(s, it.label) for s, it in zip(refset.members, train)]
    return Dataset(list(train.items) + extra, name=f"{train.name}-augmented")


@dataclass(frozen=True)
class SpectralRateRegressor:
    """predict(x) = scale * dominant_frequency(x); scale=60 maps Hz to bpm."""

    scale: float = 60.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def predict(self, x: TimeSeries) -> float:
        return self.scale * dominant_frequency(x)


def spectral_rate_regressor(scale: float = 60.0) -> SpectralRateRegressor:
    return SpectralRateRegressor(scale)


class KnnDtwRegressor:
    """Mean label of the k DTW-nearest training series; distance ties break
    toward the lower training index."""

    def __init__(self, train: Dataset, k: int = 5, band: int | None = None):
        if len(train) == 0:
            raise ValueError("training set must be non-empty")
        if not (1 <= k <= len(train)):
            raise ValueError(f"k must lie in [1, {len(train)}], got {k}")
        self._series = [it.series for it in train]
        self._labels = train.labels
        self.k = k
        self.band = band

    def predict(self, x: TimeSeries) -> float:
        dists = np.array([dtw(x, s, self.band) for s in self._series])
        order = np.argsort(dists, kind="stable")
        return float(self._labels[order[: self.k]].mean())


def knn_dtw_regressor(train: Dataset, k: int = 5,
                      band: int | None = None) -> KnnDtwRegressor:
    return KnnDtwRegressor(train, k, band)


class RidgeDescriptorRegressor:
    """Closed-form ridge fit of the label on standardized 5-feature morphology
    profiles plus an unpenalized intercept."""

    def __init__(self, train: Dataset, ridge_lambda: float = 1e-3):
        if len(train) < 6:
            raise ValueError("need at least 6 training items")
        if ridge_lambda < 0:
            raise ValueError("ridge_lambda must be >= 0")
        feats = np.stack([profile(it.series).as_array() for it in train])
        self._mean = feats.mean(axis=0)
        std = feats.std(axis=0)
        self._std = np.where(std > 0, std, 1.0)
        z = (feats - self._mean) / self._std
        y = train.labels
        self._y_mean = y.mean()
        gram = z.T @ z + ridge_lambda * np.eye(z.shape[1])
        try:
            self._coef = np.linalg.solve(gram, z.T @ (y - self._y_mean))
        except np.linalg.LinAlgError as exc:
            raise ArithmeticError(
                f"normal equations singular (ridge_lambda={ridge_lambda}): {exc}"
            ) from exc

    @property
    def coefficients(self) -> np.ndarray:
        return self._coef.copy()

    def predict(self, x: TimeSeries) -> float:
        z = (profile(x).as_array() - self._mean) / self._std
        return float(self._y_mean + z @ self._coef)

    def save_text(self, path) -> None:
        with open(path, "w") as fh:
            for name, arr in (("mean", self._mean), ("std", self._std),
                              ("coef", self._coef)):
                fh.write(f"{name} " + " ".join(repr(float(v)) for v in arr) + "\n")
            fh.write(f"y_mean {float(self._y_mean)!r}\n")

    @classmethod
    def load_text(cls, path) -> "RidgeDescriptorRegressor":
        obj = cls.__new__(cls)
        with open(path) as fh:
            fields = {}
            for line in fh:
                name, *vals = line.split()
                fields[name] = np.array([float(v) for v in vals])
        obj._mean = fields["mean"]
        obj._std = fields["std"]
        obj._coef = fields["coef"]
        obj._y_mean = float(fields["y_mean"][0])
        return obj


def ridge_descriptor_regressor(train: Dataset,
                               ridge_lambda: float = 1e-3) -> RidgeDescriptorRegressor:
    return RidgeDescriptorRegressor(train, ridge_lambda)


@dataclass
class Ensemble:
    members: list

    def __post_init__(self):
        if len(self.members) < 2:
            raise ValueError("ensemble needs at least 2 members")

    @property
    def n_boot(self) -> int:
        return len(self.members)


def fit_bootstrap_ensemble(train: Dataset, n_boot: int, base, seed: int) -> Ensemble:
    """Fit ``n_boot`` replicates, each on an independent bootstrap resample of
    the training set. ``base`` is a constructor Dataset -> regressor."""
    if n_boot < 2:
        raise ValueError("n_boot must be >= 2")
    root = np.random.SeedSequence(seed)
    member_seeds = root.generate_state(n_boot)
    members = [base(train_test_split_bootstrap(train, int(s))) for s in member_seeds]
    return Ensemble(members)


def ensemble_predict_all(e: Ensemble, x: TimeSeries) -> np.ndarray:
    return np.array([m.predict(x) for m in e.members])
