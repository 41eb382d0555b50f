"""Reference-point-niched multi-objective evolutionary loop: constrained
non-dominated sorting, niching selection, archive accumulation, and the
per-generation diagnostics (diversity, hypervolume, convergence)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .descriptors import profile
from .objectives import (EvaluationError, MorphSpec, ObjectiveVector,
                         TargetSpec, maxgrad_objective, morph_loss, out_loss)
from .operators import (BlendParams, Candidate, ReferenceSet, crossover,
                        init_population, mutate)
from .series import TimeSeries


@dataclass(frozen=True)
class RunConfig:
    population: int = 100
    generations: int = 50
    p_crossover: float = 0.6
    p_mutation: float = 0.5
    seed: int = 0
    ref_divisions: int = 12

    def __post_init__(self):
        if self.population < 4 or self.population % 2 != 0:
            raise ValueError("population must be an even integer >= 4")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        for name in ("p_crossover", "p_mutation"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


@dataclass
class GenStats:
    generation: int
    median_morph: float
    median_maxgrad: float
    median_out: float
    n_feasible: int
    archive_size: int
    diversity: float
    hypervolume: float
    convergence: float

    CSV_HEADER = ("generation,median_morph,median_maxgrad,median_out,"
                  "n_feasible,archive_size,diversity,hypervolume,convergence")

    def csv_row(self) -> str:
        return (f"{self.generation},{self.median_morph!r},{self.median_maxgrad!r},"
                f"{self.median_out!r},{self.n_feasible},{self.archive_size},"
                f"{self.diversity!r},{self.hypervolume!r},{self.convergence!r}")


@dataclass
class CfeArchive:
    """Deduplicated feasible counterfactuals accumulated across generations."""

    all_feasible: list[Candidate] = field(default_factory=list)
    final_front: list[Candidate] = field(default_factory=list)
    per_generation_stats: list[GenStats] = field(default_factory=list)
    _seen: set = field(default_factory=set, repr=False)
    _front_objs: list[np.ndarray] = field(default_factory=list, repr=False)

    def add(self, cand: Candidate) -> None:
        if cand.objective is None or not cand.objective.feasible:
            return
        key = cand.waveform.values.tobytes()
        if key in self._seen:
            return
        self._seen.add(key)
        self.all_feasible.append(cand)
        # maintain the archive's objective-space Pareto front incrementally
        v = cand.objective.as_array()
        if any(np.all(f <= v) for f in self._front_objs):
            return
        self._front_objs = [f for f in self._front_objs if not np.all(v <= f)]
        self._front_objs.append(v)

    @property
    def front_objectives(self) -> np.ndarray:
        if not self._front_objs:
            return np.empty((0, 3))
        return np.stack(self._front_objs)

    def __len__(self):
        return len(self.all_feasible)


def _dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """Constrained domination: feasible beats infeasible; otherwise standard
    Pareto dominance on the three components."""
    if a.feasible != b.feasible:
        return a.feasible
    av, bv = a.as_array(), b.as_array()
    return bool(np.all(av <= bv) and np.any(av < bv))


def non_dominated_sort(objs: list[ObjectiveVector]) -> list[list[int]]:
    """Fast non-dominated sort; returns fronts as index lists."""
    n = len(objs)
    if n == 0:
        raise ValueError("cannot sort an empty objective list")
    dominated_by = [[] for _ in range(n)]
    dom_count = np.zeros(n, dtype=int)
    for i in range(n):
        for j in range(i + 1, n):
            if _dominates(objs[i], objs[j]):
                dominated_by[i].append(j)
                dom_count[j] += 1
            elif _dominates(objs[j], objs[i]):
                dominated_by[j].append(i)
                dom_count[i] += 1
    fronts = []
    current = [i for i in range(n) if dom_count[i] == 0]
    while current:
        fronts.append(current)
        nxt = []
        for i in current:
            for j in dominated_by[i]:
                dom_count[j] -= 1
                if dom_count[j] == 0:
                    nxt.append(j)
        current = sorted(nxt)
    return fronts


def reference_points(n_obj: int, divisions: int) -> np.ndarray:
    """Das-Dennis simplex lattice: all points with coordinates i/divisions
    summing to 1; C(divisions+n_obj-1, n_obj-1) points."""
    if n_obj < 2 or divisions < 1:
        raise ValueError("need n_obj >= 2 and divisions >= 1")
    points = []
    for combo in itertools.combinations(range(divisions + n_obj - 1), n_obj - 1):
        prev = -1
        coords = []
        for c in combo:
            coords.append(c - prev - 1)
            prev = c
        coords.append(divisions + n_obj - 2 - prev)
        points.append(coords)
    return np.array(points, dtype=np.float64) / divisions


def _normalize(objs: np.ndarray) -> np.ndarray:
    """NSGA-III normalization: translate by the ideal point, divide by the
    intercepts of the hyperplane through the extreme points (achievement
    scalarizing selection); falls back to the componentwise max when the
    intercept system is degenerate."""
    ideal = objs.min(axis=0)
    translated = objs - ideal
    m = objs.shape[1]
    extremes = np.empty((m, m))
    for j in range(m):
        weights = np.full(m, 1e-6)
        weights[j] = 1.0
        asf = (translated / weights).max(axis=1)
        extremes[j] = translated[np.argmin(asf)]
    intercepts = None
    try:
        coeffs = np.linalg.solve(extremes, np.ones(m))
        candidate = 1.0 / coeffs
        if np.all(np.isfinite(candidate)) and np.all(candidate > 1e-12):
            intercepts = candidate
    except np.linalg.LinAlgError:
        pass
    if intercepts is None:
        intercepts = translated.max(axis=0)
    intercepts = np.where(intercepts > 1e-12, intercepts, 1.0)
    return translated / intercepts


def _associate(normed: np.ndarray, refpoints: np.ndarray):
    """Nearest reference direction per point, by perpendicular distance."""
    norms = np.linalg.norm(refpoints, axis=1)
    dirs = refpoints / norms[:, None]
    proj = normed @ dirs.T                       # (n, r) scalar projections
    proj_vecs = proj[:, :, None] * dirs[None, :, :]
    dists = np.linalg.norm(normed[:, None, :] - proj_vecs, axis=2)
    nearest = dists.argmin(axis=1)
    return nearest, dists[np.arange(normed.shape[0]), nearest]


def environmental_select(pool: list[Candidate], P: int, refpoints: np.ndarray,
                         rng: np.random.Generator) -> list[Candidate]:
    """Front-fill selection with reference-point niching on the boundary
    front; deterministic given the rng state."""
    if len(pool) < P:
        raise ValueError(f"selection pool ({len(pool)}) smaller than P ({P})")
    fronts = non_dominated_sort([c.objective for c in pool])
    for rank, front in enumerate(fronts, start=1):
        for i in front:
            pool[i].rank = rank
    selected_idx: list[int] = []
    boundary: list[int] = []
    for front in fronts:
        if len(selected_idx) + len(front) <= P:
            selected_idx.extend(front)
            if len(selected_idx) == P:
                return [pool[i] for i in selected_idx]
        else:
            boundary = front
            break
    # niche the boundary front
    consider = selected_idx + boundary
    objs = np.stack([pool[i].objective.as_array() for i in consider])
    normed = _normalize(objs)
    nearest, perp = _associate(normed, refpoints)
    n_sel = len(selected_idx)
    niche_count = np.zeros(refpoints.shape[0], dtype=int)
    for pos in range(n_sel):
        niche_count[nearest[pos]] += 1
    remaining = {pos: boundary[pos - n_sel] for pos in range(n_sel, len(consider))}
    active = np.ones(refpoints.shape[0], dtype=bool)
    while len(selected_idx) < P:
        counts = np.where(active, niche_count, np.iinfo(np.int64).max)
        min_count = counts.min()
        tied = np.flatnonzero(counts == min_count)
        niche = int(tied[rng.integers(0, tied.size)])
        members = [pos for pos in remaining if nearest[pos] == niche]
        if not members:
            active[niche] = False
            continue
        if niche_count[niche] == 0:
            pick = min(members, key=lambda pos: (perp[pos], pos))
        else:
            pick = members[int(rng.integers(0, len(members)))]
        selected_idx.append(remaining.pop(pick))
        niche_count[niche] += 1
    return [pool[i] for i in selected_idx]


def tournament_select(pop: list[Candidate], count: int,
                      seed: int | np.random.Generator) -> list[Candidate]:
    """Size-2 tournaments on Pareto rank; rank ties resolved uniformly."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    winners = []
    for _ in range(count):
        i, j = rng.integers(0, len(pop), size=2)
        a, b = pop[int(i)], pop[int(j)]
        if a.rank is None or b.rank is None:
            raise ValueError("tournament requires a ranked population")
        if a.rank < b.rank:
            winners.append(a)
        elif b.rank < a.rank:
            winners.append(b)
        else:
            winners.append(a if rng.random() < 0.5 else b)
    return winners


def hypervolume(front: np.ndarray, ref_point: np.ndarray) -> float:
    """Lebesgue measure of the union of boxes [point, ref_point], computed by
    recursive slicing on the first objective."""
    front = np.atleast_2d(np.asarray(front, dtype=np.float64))
    ref = np.asarray(ref_point, dtype=np.float64)
    if front.shape[1] != ref.shape[0]:
        raise ValueError("front and reference point dimensions differ")
    if np.any(front > ref):
        raise ValueError("every front point must dominate the reference point")
    return _hv(front, ref)


def _hv(points: np.ndarray, ref: np.ndarray) -> float:
    if points.shape[0] == 0:
        return 0.0
    if ref.shape[0] == 1:
        return float(ref[0] - points[:, 0].min())
    if ref.shape[0] == 2:
        return _hv2(points, ref)
    order = np.argsort(points[:, 0])
    points = points[order]
    total = 0.0
    xs = points[:, 0]
    for i in range(points.shape[0]):
        right = xs[i + 1] if i + 1 < points.shape[0] else ref[0]
        width = right - xs[i]
        if width <= 0:
            continue
        total += width * _hv(points[: i + 1, 1:], ref[1:])
    return total


def _hv2(points: np.ndarray, ref: np.ndarray) -> float:
    """2-D hypervolume by a single sweep over x-sorted points."""
    order = np.lexsort((points[:, 1], points[:, 0]))
    pts = points[order]
    total = 0.0
    best_y = np.inf
    xs = pts[:, 0]
    for i in range(pts.shape[0]):
        if pts[i, 1] < best_y:
            best_y = pts[i, 1]
        right = xs[i + 1] if i + 1 < pts.shape[0] else ref[0]
        if right > xs[i]:
            total += (right - xs[i]) * (ref[1] - best_y)
    return float(total)


def _minmax_normalize(objs: np.ndarray) -> np.ndarray:
    lo, hi = objs.min(axis=0), objs.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    return (objs - lo) / span


def diversity_metric(pop: list[Candidate]) -> float:
    """Mean pairwise Euclidean distance between min-max-normalized objective
    vectors; 0 for fewer than two members."""
    if len(pop) < 2:
        return 0.0
    objs = _minmax_normalize(np.stack([c.objective.as_array() for c in pop]))
    diffs = objs[:, None, :] - objs[None, :, :]
    dists = np.linalg.norm(diffs, axis=2)
    n = len(pop)
    return float(dists.sum() / (n * (n - 1)))


def convergence_metric(pop: list[Candidate],
                       previous_front: np.ndarray | None) -> float:
    """Generational distance from the current rank-1 front to the previous
    one: mean nearest-neighbor distance in objective space."""
    if previous_front is None or previous_front.shape[0] == 0 or not pop:
        return 0.0
    current = np.stack([c.objective.as_array() for c in pop if c.rank == 1])
    if current.shape[0] == 0:
        return 0.0
    d = np.linalg.norm(current[:, None, :] - previous_front[None, :, :], axis=2)
    return float(d.min(axis=1).mean())


def _current_front(pop: list[Candidate]) -> np.ndarray:
    return np.stack([c.objective.as_array() for c in pop if c.rank == 1])


def _archive_front_hv(archive: CfeArchive, ref: np.ndarray) -> float:
    front = archive.front_objectives
    if front.shape[0] == 0:
        return 0.0
    inside = front[np.all(front <= ref, axis=1)]
    if inside.shape[0] == 0:
        return 0.0
    return hypervolume(inside, ref)


def _evaluate_population(x, cands, spec, target, regressor, base_profile,
                         archive) -> None:
    for c in cands:
        if c.objective is not None:
            continue
        try:
            yhat = float(regressor.predict(c.waveform))
        except Exception as exc:
            raise EvaluationError(f"regressor failed during evaluation: {exc}") from exc
        o_out, feasible = out_loss(target, yhat)
        o_morph = morph_loss(x, c.waveform, spec, base_profile=base_profile)
        if not feasible:
            from .objectives import INFEASIBLE_MORPH_PENALTY
            o_morph += INFEASIBLE_MORPH_PENALTY * o_out
        c.objective = ObjectiveVector(o_morph, maxgrad_objective(c.waveform),
                                      o_out, feasible)
        c.prediction = yhat
        archive.add(c)


def run(x: TimeSeries, target: TargetSpec, spec: MorphSpec,
        refset: ReferenceSet, regressor, cfg: RunConfig,
        blend: BlendParams = BlendParams(), gamma: int = 50) -> CfeArchive:
    """Full evolutionary search for one query instance.

    Initialization from the reference set, then ``cfg.generations`` rounds of
    tournament selection, pairwise smooth-blending crossover, reference-set
    mutation, evaluation, and niched environmental selection. Every feasible
    evaluation lands in the archive. Fully deterministic under ``cfg.seed``.
    """
    root = np.random.SeedSequence(cfg.seed)
    init_seed, loop_seed = root.spawn(2)
    rng = np.random.default_rng(loop_seed)
    base_profile = profile(x)
    refpoints = reference_points(3, cfg.ref_divisions)
    archive = CfeArchive()

    pop = init_population(refset, cfg.population,
                          gamma, int(init_seed.generate_state(1)[0]))
    _evaluate_population(x, pop, spec, target, regressor, base_profile, archive)
    for rank, front in enumerate(non_dominated_sort([c.objective for c in pop]), 1):
        for i in front:
            pop[i].rank = rank

    hv_ref = np.stack([c.objective.as_array() for c in pop]).max(axis=0) * 1.1 + 1e-6
    previous_front = None

    for g in range(1, cfg.generations + 1):
        offspring = list(tournament_select(pop, cfg.population, rng))
        for j in range(1, len(offspring)):
            if rng.random() < cfg.p_crossover:
                c1, c2 = crossover(offspring[j - 1], offspring[j], blend,
                                   int(rng.integers(0, 2**31)))
                offspring[j - 1], offspring[j] = c1, c2
        for j in range(len(offspring)):
            if rng.random() < cfg.p_mutation:
                offspring[j] = mutate(offspring[j], refset, blend,
                                      int(rng.integers(0, 2**31)))
        # copy-selected survivors share waveforms with parents; evaluation is
        # skipped for candidates that already carry an objective
        offspring = [
            c if c.objective is None else Candidate(c.waveform, c.window_len,
                                                    c.objective, None, c.prediction)
            for c in offspring
        ]
        _evaluate_population(x, offspring, spec, target, regressor, base_profile,
                             archive)
        pop = environmental_select(offspring + pop, cfg.population, refpoints, rng)

        objs = np.stack([c.objective.as_array() for c in pop])
        stats = GenStats(
            generation=g,
            median_morph=float(np.median(objs[:, 0])),
            median_maxgrad=float(np.median(objs[:, 1])),
            median_out=float(np.median(objs[:, 2])),
            n_feasible=sum(c.objective.feasible for c in pop),
            archive_size=len(archive),
            diversity=diversity_metric(pop),
            hypervolume=_archive_front_hv(archive, hv_ref),
            convergence=convergence_metric(pop, previous_front),
        )
        archive.per_generation_stats.append(stats)
        previous_front = _current_front(pop)

    archive.final_front = [c for c in pop if c.rank == 1]
    return archive
