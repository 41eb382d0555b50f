"""Reference-set construction, population initialization, and the cosine
smooth-blending crossover/mutation operators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .objectives import ObjectiveVector
from .series import Dataset, TimeSeries
from .signal_ops import SsaConfig, ssa_reconstruct


@dataclass
class ReferenceSet:
    """SSA-denoised training waveforms; the sampling pool for initialization
    and mutation."""

    members: list[TimeSeries]

    def __post_init__(self):
        if not self.members:
            raise ValueError("reference set must be non-empty")
        T = len(self.members[0])
        for i, m in enumerate(self.members):
            if len(m) != T:
                raise ValueError(f"reference member {i} has length {len(m)}, expected {T}")

    def __len__(self):
        return len(self.members)


@dataclass
class Candidate:
    waveform: TimeSeries
    window_len: int
    objective: ObjectiveVector | None = None
    rank: int | None = None
    prediction: float | None = None


@dataclass(frozen=True)
class BlendParams:
    """Cosine cross-fade parameters. With the defaults the weights decrease
    from 1 at the window start to 0 at its end."""

    beta: float = 1.0
    eta: float = 0.5
    nu: float = 0.5


def build_reference_set(train: Dataset, ssa: SsaConfig) -> ReferenceSet:
    if len(train) == 0:
        raise ValueError("training set must be non-empty")
    members = []
    for i, item in enumerate(train):
        try:
            members.append(ssa_reconstruct(item.series, ssa))
        except Exception as exc:
            raise RuntimeError(f"SSA failed on training series {i}: {exc}") from exc
    return ReferenceSet(members)


def init_population(refset: ReferenceSet, P: int, gamma: int,
                    seed: int) -> list[Candidate]:
    """Draw P waveforms uniformly with replacement from the reference set,
    each with an independent uniform window length in [gamma, T/2]."""
    T = len(refset.members[0])
    if P < 2:
        raise ValueError("population size must be >= 2")
    if not (1 <= gamma < T // 2):
        raise ValueError(f"gamma must lie in [1, T/2) = [1, {T // 2}), got {gamma}")
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(refset), size=P)
    windows = rng.integers(gamma, T // 2 + 1, size=P)
    return [
        Candidate(waveform=refset.members[i], window_len=int(w))
        for i, w in zip(picks, windows)
    ]


def blend_weights(interval_len: int, p: BlendParams = BlendParams()) -> np.ndarray:
    """alpha_u = beta * (1 + cos(eta*pi + nu*pi*u/(|I|-1))), u = 0..|I|-1."""
    if interval_len < 2:
        raise ValueError(f"blend interval must have >= 2 samples, got {interval_len}")
    u = np.arange(interval_len)
    return p.beta * (1.0 + np.cos(p.eta * np.pi + p.nu * np.pi * u / (interval_len - 1)))


def _blend_into(own: np.ndarray, other: np.ndarray, start: int, end: int,
                p: BlendParams) -> np.ndarray:
    """own before [start, end), cosine blend inside, other after."""
    T = own.shape[0]
    out = np.empty(T)
    out[:start] = own[:start]
    out[end:] = other[end:]
    if end - start >= 2:
        alpha = blend_weights(end - start, p)
        out[start:end] = alpha * own[start:end] + (1.0 - alpha) * other[start:end]
    elif end - start == 1:
        # degenerate single-sample interval: weight formula divides by |I|-1
        out[start] = own[start]
    return out


def crossover(a: Candidate, b: Candidate, p: BlendParams,
              seed: int) -> tuple[Candidate, Candidate]:
    """Smooth blending crossover. Each offspring transitions from its own
    parent to the other across a cosine-weighted interval centered at a random
    start index; window lengths are inherited from the parents."""
    av, bv = a.waveform.values, b.waveform.values
    if av.shape[0] != bv.shape[0]:
        raise ValueError("crossover parents must share length")
    T = av.shape[0]
    rng = np.random.default_rng(seed)
    children = []
    for own_cand, other_cand in ((a, b), (b, a)):
        w = own_cand.window_len
        s = int(rng.integers(0, max(0, T - w) + 1))
        start, end = max(0, s - w), min(T, s + w)
        child = _blend_into(own_cand.waveform.values, other_cand.waveform.values,
                            start, end, p)
        children.append(Candidate(
            waveform=own_cand.waveform.with_values(child),
            window_len=w,
        ))
    return children[0], children[1]


def mutate(a: Candidate, refset: ReferenceSet, p: BlendParams,
           seed: int) -> Candidate:
    """Blend a randomly drawn reference waveform into a's window; the signal
    outside [s, s+w) is preserved exactly."""
    T = len(a.waveform)
    rng = np.random.default_rng(seed)
    z = refset.members[int(rng.integers(0, len(refset)))]
    w = a.window_len
    s = int(rng.integers(0, max(0, T - w) + 1))
    start, end = s, min(T, s + w)
    out = a.waveform.values.copy()
    if end - start >= 2:
        alpha = blend_weights(end - start, p)
        out[start:end] = alpha * out[start:end] + (1.0 - alpha) * z.values[start:end]
    return Candidate(waveform=a.waveform.with_values(out), window_len=w)
