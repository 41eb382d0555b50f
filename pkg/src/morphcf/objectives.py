"""The three-objective vector driving the counterfactual search: morphology
preservation, smoothness, and target attainment, plus the feasibility flag."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .descriptors import PropertyProfile, profile, max_gradient
from .series import TimeSeries

PRESERVE = "preserve"
CHANGE = "change"

# default per-descriptor weights: amplitude / dominant frequency / plateau
# get full weight, trend and max-gradient half
DEFAULT_WEIGHTS = (1.0, 1.0, 1.0, 0.5, 0.5)


@dataclass(frozen=True)
class MorphSpec:
    """Per-descriptor mode (preserve/change), weight, and change threshold."""

    modes: tuple[str, ...] = (PRESERVE,) * 5
    weights: tuple[float, ...] = DEFAULT_WEIGHTS
    thresholds: tuple[float, ...] = (0.0,) * 5  # used only for change-mode entries
    epsilon: float = 1e-8

    def __post_init__(self):
        if not (len(self.modes) == len(self.weights) == len(self.thresholds) == 5):
            raise ValueError("MorphSpec must cover all five descriptors")
        for j, (m, w, tau) in enumerate(zip(self.modes, self.weights, self.thresholds)):
            if m not in (PRESERVE, CHANGE):
                raise ValueError(f"descriptor {j}: unknown mode {m!r}")
            if w <= 0:
                raise ValueError(f"descriptor {j}: weight must be positive")
            if m == CHANGE and tau <= 0:
                raise ValueError(f"descriptor {j}: change mode needs a positive threshold")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    def to_dict(self) -> dict:
        return {
            "modes": list(self.modes),
            "weights": list(self.weights),
            "thresholds": list(self.thresholds),
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MorphSpec":
        return cls(
            modes=tuple(d.get("modes", (PRESERVE,) * 5)),
            weights=tuple(d.get("weights", DEFAULT_WEIGHTS)),
            thresholds=tuple(d.get("thresholds", (0.0,) * 5)),
            epsilon=float(d.get("epsilon", 1e-8)),
        )


@dataclass(frozen=True)
class TargetSpec:
    """Desired prediction interval [label - tolerance, label + tolerance]."""

    label: float
    tolerance: float = 5.0

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")

    @property
    def interval(self) -> tuple[float, float]:
        return (self.label - self.tolerance, self.label + self.tolerance)

    def contains(self, yhat: float) -> bool:
        return abs(self.label - yhat) <= self.tolerance


@dataclass(frozen=True)
class ObjectiveVector:
    morph: float
    maxgrad: float
    out: float
    feasible: bool

    def as_array(self) -> np.ndarray:
        return np.array([self.morph, self.maxgrad, self.out])


class EvaluationError(RuntimeError):
    """Regressor failure during candidate evaluation."""


def normalized_deviation(x: TimeSeries, xp: TimeSeries, j: int,
                         eps: float = 1e-8) -> float:
    """(phi_j(x') - phi_j(x)) / (|phi_j(x)| + eps)."""
    px, pxp = profile(x).as_array(), profile(xp).as_array()
    return float((pxp[j] - px[j]) / (abs(px[j]) + eps))


def _deviations(base: PropertyProfile, cand: PropertyProfile, eps: float) -> np.ndarray:
    b, c = base.as_array(), cand.as_array()
    return (c - b) / (np.abs(b) + eps)


def morph_loss(x: TimeSeries, xp: TimeSeries, spec: MorphSpec,
               base_profile: PropertyProfile | None = None) -> float:
    """Weighted sum over descriptors of |deviation| for preserve-mode entries
    and the hinge max(0, tau - |deviation|) for change-mode entries.

    ``base_profile`` lets callers amortize the query profile across many
    candidates.
    """
    base = base_profile if base_profile is not None else profile(x)
    deltas = np.abs(_deviations(base, profile(xp), spec.epsilon))
    total = 0.0
    for j in range(5):
        if spec.modes[j] == PRESERVE:
            total += spec.weights[j] * deltas[j]
        else:
            total += spec.weights[j] * max(0.0, spec.thresholds[j] - deltas[j])
    return float(total)


def maxgrad_objective(xp: TimeSeries) -> float:
    """Q95 of raw absolute first differences (no dt scaling)."""
    return max_gradient(xp, scale_by_dt=False)


def out_loss(target: TargetSpec, yhat: float) -> tuple[float, bool]:
    """Hinge distance to the target interval; zero inside, linear outside."""
    if not np.isfinite(yhat):
        raise ValueError(f"prediction must be finite, got {yhat}")
    gap = abs(target.label - yhat)
    return max(0.0, gap - target.tolerance), gap <= target.tolerance


INFEASIBLE_MORPH_PENALTY = 10.0


def evaluate_candidate(x: TimeSeries, xp: TimeSeries, spec: MorphSpec,
                       target: TargetSpec, regressor,
                       base_profile: PropertyProfile | None = None) -> ObjectiveVector:
    """Assemble the full objective vector for one candidate waveform.

    Infeasible candidates additionally carry the out-loss into the morphology
    component (scaled by a fixed penalty factor) so selection pushes them back
    toward the target region even before constrained domination kicks in.
    """
    try:
        yhat = float(regressor.predict(xp))
    except Exception as exc:
        raise EvaluationError(f"regressor failed on candidate: {exc}") from exc
    o_out, feasible = out_loss(target, yhat)
    o_morph = morph_loss(x, xp, spec, base_profile=base_profile)
    if not feasible:
        o_morph += INFEASIBLE_MORPH_PENALTY * o_out
    return ObjectiveVector(
        morph=o_morph,
        maxgrad=maxgrad_objective(xp),
        out=o_out,
        feasible=feasible,
    )
