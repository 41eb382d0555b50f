"""Core series/dataset types, the `.ts` regression format, and a synthetic
pulse-wave generator for desk-scale experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ParseError(ValueError):
    """Raised when a `.ts` file line cannot be parsed."""


@dataclass(frozen=True)
class TimeSeries:
    """Fixed-rate univariate signal; the unit of all edits and predictions."""

    values: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.shape[0] < 2:
            raise ValueError(f"series needs >= 2 samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("series contains non-finite samples")
        if not (self.sample_rate_hz > 0):
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")

    def __len__(self):
        return int(self.values.shape[0])

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate_hz

    def with_values(self, values: np.ndarray) -> "TimeSeries":
        return TimeSeries(values=values, sample_rate_hz=self.sample_rate_hz)

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.sample_rate_hz == other.sample_rate_hz
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.values.tobytes(), self.sample_rate_hz))


@dataclass(frozen=True)
class LabeledSeries:
    series: TimeSeries
    label: float

    def __post_init__(self):
        if not math.isfinite(self.label):
            raise ValueError(f"label must be finite, got {self.label}")


@dataclass
class Dataset:
    items: list[LabeledSeries]
    name: str = "dataset"

    def __post_init__(self):
        if self.items:
            T = len(self.items[0].series)
            fs = self.items[0].series.sample_rate_hz
            for i, item in enumerate(self.items):
                if len(item.series) != T:
                    raise ValueError(
                        f"ragged dataset: item {i} has length {len(item.series)}, expected {T}"
                    )
                if item.series.sample_rate_hz != fs:
                    raise ValueError(f"item {i} sample rate differs from item 0")

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def labels(self) -> np.ndarray:
        return np.array([it.label for it in self.items], dtype=np.float64)

    @property
    def series_matrix(self) -> np.ndarray:
        return np.stack([it.series.values for it in self.items])


def parse_ts_dataset(path, sample_rate_hz: float = 125.0, name: str | None = None,
                     zscore: bool = False) -> Dataset:
    """Parse a Monash/UEA `.ts` regression file.

    Lines starting with '@' are headers, '#' are comments. Each data line is
    comma-separated samples with the scalar target after a final colon.
    ``zscore`` optionally standardizes each series (off by default).
    """
    items = []
    problem_name = name
    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("@"):
                parts = line.split(None, 1)
                if parts[0].lower() == "@problemname" and len(parts) > 1 and name is None:
                    problem_name = parts[1].strip()
                continue
            if ":" not in line:
                raise ParseError(f"{path}: line {lineno}: missing ':' before target")
            values_part, _, label_part = line.rpartition(":")
            try:
                values = np.array([float(tok) for tok in values_part.split(",")])
                label = float(label_part)
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from None
            if zscore:
                std = values.std()
                values = (values - values.mean()) / (std if std > 0 else 1.0)
            items.append(LabeledSeries(TimeSeries(values, sample_rate_hz), label))
    return Dataset(items, name=problem_name or "dataset")


def write_ts_dataset(d: Dataset, path) -> None:
    """Write a Dataset in the `.ts` regression format (round-trips with
    :func:`parse_ts_dataset` to full float precision)."""
    with open(path, "w") as fh:
        fh.write(f"@problemName {d.name}\n")
        fh.write("@timeStamps false\n")
        fh.write("@univariate true\n")
        fh.write("@targetlabel true\n")
        fh.write("@data\n")
        for item in d.items:
            vals = ",".join(repr(float(v)) for v in item.series.values)
            fh.write(f"{vals}:{item.label!r}\n")


def synth_ppg(heart_rate_bpm: float, duration_s: float, sample_rate_hz: float = 125.0,
              noise_std: float = 0.0, seed: int = 0) -> LabeledSeries:
    """Quasi-periodic pulse train with an asymmetric per-beat template.

    Each beat is a sum of two Gaussians: a sharp systolic peak followed by a
    smaller dicrotic bump at 0.4 of the beat period. Label = heart rate.
    """
    if not (30.0 <= heart_rate_bpm <= 220.0):
        raise ValueError(f"heart_rate_bpm out of range [30, 220]: {heart_rate_bpm}")
    if duration_s <= 0:
        raise ValueError(f"duration_s must be positive, got {duration_s}")
    f0 = heart_rate_bpm / 60.0
    period = 1.0 / f0
    n = int(round(duration_s * sample_rate_hz))
    t = np.arange(n) / sample_rate_hz
    # phase within the current beat, in [0, period)
    phase = np.mod(t, period)
    sys_center, sys_width = 0.15 * period, 0.1 * period
    dic_center, dic_width = 0.4 * period, 0.1 * period
    signal = np.zeros(n)
    # neighboring beats leak into the current window; three wraps suffice at
    # these template widths
    for k in (-1, 0, 1):
        ph = phase + k * period
        signal += np.exp(-0.5 * ((ph - sys_center) / sys_width) ** 2)
        signal += 0.35 * np.exp(-0.5 * ((ph - dic_center) / dic_width) ** 2)
    # zero-mean pulse train (AC-coupled, as wearable front-ends deliver)
    signal -= signal.mean()
    if noise_std > 0:
        rng = np.random.default_rng(seed)
        signal = signal + rng.normal(0.0, noise_std, size=n)
    return LabeledSeries(TimeSeries(signal, sample_rate_hz), float(heart_rate_bpm))


def synth_ppg_dataset(labels_bpm, duration_s: float, sample_rate_hz: float = 125.0,
                      noise_std: float = 0.02, seed: int = 0,
                      name: str = "synthetic-ppg",
                      amplitude_jitter: float = 0.2) -> Dataset:
    """Generate one synthetic labeled series per requested heart rate.

    Each series gets a label-independent amplitude factor drawn uniformly from
    [1 - amplitude_jitter, 1 + amplitude_jitter], so amplitude-like features
    carry realistic spread without informing the label.
    """
    labels = [float(b) for b in labels_bpm]
    root = np.random.SeedSequence(seed)
    child_seeds = root.generate_state(len(labels))
    amp_rng = np.random.default_rng(root.spawn(1)[0])
    items = []
    for bpm, s in zip(labels, child_seeds):
        item = synth_ppg(bpm, duration_s, sample_rate_hz, noise_std, int(s))
        scale = 1.0 + amplitude_jitter * amp_rng.uniform(-1.0, 1.0)
        items.append(LabeledSeries(item.series.with_values(item.series.values * scale),
                                   item.label))
    return Dataset(items, name=name)


def train_test_split_bootstrap(d: Dataset, seed: int) -> Dataset:
    """Resample a dataset with replacement (same size), deterministically."""
    if len(d) == 0:
        raise ValueError("cannot bootstrap an empty dataset")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(d), size=len(d))
    return Dataset([d.items[i] for i in idx], name=f"{d.name}-boot{seed}")
