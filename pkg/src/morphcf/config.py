"""Experiment configuration: a single YAML document with commented defaults;
CLI flags override individual fields."""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .nsga3 import RunConfig
from .objectives import MorphSpec
from .operators import BlendParams

DEFAULT_CONFIG_TEXT = """\
# morphcf experiment configuration (defaults shown; override any field)

dataset:
  source: synthetic        # "synthetic" or "file"
  train_path: null         # .ts file (source: file)
  test_path: null          # .ts file (source: file)
  sample_rate_hz: 125.0
  zscore: false            # optional per-series z-score preprocessing
  synthetic:
    n_train: 200
    n_test: 20
    duration_s: 8.0        # 8 s at 125 Hz -> 1000 samples
    label_min: 60.0
    label_max: 120.0
    noise_std: 0.02
    exclude_band: null     # e.g. [100, 110] to leave a label gap in training

regressor:
  kind: ridge              # ridge | spectral | knn
  ridge_lambda: 0.001
  knn_k: 5
  augment_with_reference: true   # fit on raw + denoised training series

target:
  tolerance: 5.0           # half-width of the desired prediction interval

morphology:                # one entry per descriptor: amplitude, dominant
                           # frequency, plateau fraction, trend, max gradient
  modes: [preserve, preserve, preserve, preserve, preserve]
  weights: [1.0, 1.0, 1.0, 0.5, 0.5]
  thresholds: [0.0, 0.0, 0.0, 0.0, 0.0]
  epsilon: 1.0e-8

optimizer:
  population: 100
  generations: 50
  p_crossover: 0.6
  p_mutation: 0.5
  ref_divisions: 12        # Das-Dennis divisions (91 directions at 3 objectives)

blend:
  beta: 1.0
  eta: 0.5
  nu: 0.5

gamma: 50                  # minimum editable window length (samples)

ssa:
  window_len: null         # default min(250, T/4)
  n_components: 2

dtw_band: null             # default: unconstrained up to T=512, 10% band above

metrics:
  k: 5                     # plausibility neighborhood size
  n_bins: 50               # magnitude-level histogram bins
  atol: 1.0e-9             # difference-mask tolerance

uncertainty:
  n_boot: 20
  bin_edges: [55, 65, 75, 85, 95, 105, 115, 125, 135]
  bandwidth: null          # Scott's rule when null

instances:
  indices: null            # explicit test-set indices, e.g. [0, 3, 7]
  count: 3                 # otherwise: this many, drawn under the master seed

output_dir: out
seed: 0
"""

DEFAULTS: dict = yaml.safe_load(DEFAULT_CONFIG_TEXT)


def _deep_merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


@dataclass
class ExperimentConfig:
    raw: dict = field(default_factory=lambda: dict(DEFAULTS))

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            user = yaml.safe_load(fh) or {}
        return cls(_deep_merge(DEFAULTS, user))

    @classmethod
    def from_dict(cls, override: dict) -> "ExperimentConfig":
        return cls(_deep_merge(DEFAULTS, override))

    def __getitem__(self, key):
        return self.raw[key]

    @property
    def run_config(self) -> RunConfig:
        o = self.raw["optimizer"]
        return RunConfig(
            population=int(o["population"]),
            generations=int(o["generations"]),
            p_crossover=float(o["p_crossover"]),
            p_mutation=float(o["p_mutation"]),
            seed=int(self.raw["seed"]),
            ref_divisions=int(o["ref_divisions"]),
        )

    @property
    def morph_spec(self) -> MorphSpec:
        return MorphSpec.from_dict(self.raw["morphology"])

    @property
    def blend_params(self) -> BlendParams:
        b = self.raw["blend"]
        return BlendParams(beta=float(b["beta"]), eta=float(b["eta"]),
                           nu=float(b["nu"]))

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            yaml.safe_dump(self.raw, fh, sort_keys=False)
