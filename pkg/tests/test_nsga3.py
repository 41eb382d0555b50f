import math

import numpy as np
import pytest

from morphcf.nsga3 import (CfeArchive, RunConfig, _dominates,
                           diversity_metric, environmental_select, hypervolume,
                           non_dominated_sort, reference_points, run,
                           tournament_select)
from morphcf.objectives import MorphSpec, ObjectiveVector, TargetSpec
from morphcf.operators import Candidate
from morphcf.regressors import SpectralRateRegressor
from morphcf.series import synth_ppg, synth_ppg_dataset
from morphcf.signal_ops import SsaConfig
from morphcf.operators import build_reference_set

from conftest import make_series


def vec(m, g, o, feasible=True):
    return ObjectiveVector(m, g, o, feasible)


def brute_force_fronts(objs):
    """Oracle: peel non-dominated layers by direct definition."""
    remaining = set(range(len(objs)))
    fronts = []
    while remaining:
        front = sorted(
            i for i in remaining
            if not any(_dominates(objs[j], objs[i]) for j in remaining if j != i)
        )
        fronts.append(front)
        remaining -= set(front)
    return fronts


class TestDominance:
    def test_strict(self):
        assert _dominates(vec(1, 1, 1), vec(2, 2, 2))

    def test_equal_not_dominating(self):
        assert not _dominates(vec(1, 1, 1), vec(1, 1, 1))

    def test_incomparable(self):
        assert not _dominates(vec(1, 2, 1), vec(2, 1, 1))
        assert not _dominates(vec(2, 1, 1), vec(1, 2, 1))

    def test_feasible_beats_infeasible(self):
        assert _dominates(vec(9, 9, 9, True), vec(0, 0, 0, False))
        assert not _dominates(vec(0, 0, 0, False), vec(9, 9, 9, True))

    def test_both_infeasible_pareto(self):
        assert _dominates(vec(1, 1, 1, False), vec(2, 2, 2, False))


class TestNonDominatedSort:
    def test_small_example(self):
        objs = [vec(1, 1, 1), vec(2, 2, 2), vec(0.5, 3, 1), vec(3, 3, 3)]
        fronts = non_dominated_sort(objs)
        assert fronts[0] == [0, 2]
        assert fronts[1] == [1]
        assert fronts[2] == [3]

    def test_constrained_example(self):
        objs = [vec(5, 5, 5, True), vec(0, 0, 0, False)]
        assert non_dominated_sort(objs) == [[0], [1]]

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(0)
        for trial in range(50):
            n = int(rng.integers(2, 40))
            objs = [
                vec(*rng.integers(0, 5, size=3).astype(float),
                    feasible=bool(rng.random() < 0.7))
                for _ in range(n)
            ]
            assert non_dominated_sort(objs) == brute_force_fronts(objs)

    def test_partition(self):
        rng = np.random.default_rng(1)
        objs = [vec(*rng.normal(size=3)) for _ in range(30)]
        fronts = non_dominated_sort(objs)
        flat = sorted(i for f in fronts for i in f)
        assert flat == list(range(30))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            non_dominated_sort([])


class TestReferencePoints:
    def test_counts(self):
        # C(p+m-1, m-1)
        assert reference_points(3, 1).shape == (3, 3)
        assert reference_points(3, 4).shape == (15, 3)
        assert reference_points(3, 12).shape == (91, 3)
        assert reference_points(2, 5).shape == (6, 2)

    def test_simplex_membership(self):
        pts = reference_points(3, 12)
        np.testing.assert_allclose(pts.sum(axis=1), 1.0)
        assert np.all(pts >= 0)

    def test_distinct(self):
        pts = reference_points(3, 12)
        assert len({tuple(p) for p in pts}) == len(pts)

    def test_divisions_one_gives_unit_vectors(self):
        pts = reference_points(3, 1)
        np.testing.assert_allclose(np.sort(pts, axis=0), np.sort(np.eye(3), axis=0))


class TestHypervolume:
    def test_single_point(self):
        assert hypervolume(np.array([[1.0, 1.0]]), np.array([3.0, 4.0])) == 6.0

    def test_two_point_staircase(self):
        front = np.array([[1.0, 2.0], [2.0, 1.0]])
        assert hypervolume(front, np.array([3.0, 3.0])) == pytest.approx(3.0)

    def test_dominated_point_no_effect(self):
        front = np.array([[1.0, 2.0], [2.0, 1.0], [2.5, 2.5]])
        assert hypervolume(front, np.array([3.0, 3.0])) == pytest.approx(3.0)

    def test_3d_unit_cube(self):
        assert hypervolume(np.zeros((1, 3)), np.ones(3)) == pytest.approx(1.0)

    def test_3d_two_boxes(self):
        front = np.array([[0.0, 0.0, 0.5], [0.5, 0.5, 0.0]])
        # box1 = 0.5, box2 = 0.25, overlap = 0.5*0.5*0.5/... compute: union
        # box1: [0,1]x[0,1]x[0.5,1] vol 0.5; box2: [0.5,1]x[0.5,1]x[0,1] vol 0.25
        # intersection: [0.5,1]x[0.5,1]x[0.5,1] vol 0.125 -> union 0.625
        assert hypervolume(front, np.ones(3)) == pytest.approx(0.625)

    def test_monte_carlo_oracle_3d(self):
        rng = np.random.default_rng(2)
        front = rng.uniform(0, 1, size=(6, 3))
        ref = np.ones(3)
        exact = hypervolume(front, ref)
        samples = rng.uniform(0, 1, size=(200_000, 3))
        covered = np.zeros(len(samples), dtype=bool)
        for p in front:
            covered |= np.all(samples >= p, axis=1)
        mc = covered.mean()
        assert exact == pytest.approx(mc, abs=0.01)

    def test_nondominating_point_rejected(self):
        with pytest.raises(ValueError):
            hypervolume(np.array([[2.0, 2.0]]), np.array([1.0, 3.0]))


def _make_pop(objs):
    pop = []
    for o in objs:
        c = Candidate(make_series(np.random.default_rng(len(pop)).normal(size=16)),
                      window_len=4, objective=o)
        pop.append(c)
    return pop


class TestEnvironmentalSelect:
    def test_exact_fit_identity(self):
        objs = [vec(1, 2, 3), vec(2, 1, 3), vec(3, 3, 1), vec(0.5, 0.5, 0.5)]
        pop = _make_pop(objs)
        out = environmental_select(pop, 4, reference_points(3, 4),
                                   np.random.default_rng(0))
        assert sorted(id(c) for c in out) == sorted(id(c) for c in pop)

    def test_first_front_priority(self):
        objs = [vec(1, 1, 1), vec(0.5, 2, 1), vec(5, 5, 5), vec(6, 6, 6),
                vec(7, 7, 7), vec(8, 8, 8)]
        pop = _make_pop(objs)
        out = environmental_select(pop, 2, reference_points(3, 4),
                                   np.random.default_rng(0))
        assert {id(c) for c in out} == {id(pop[0]), id(pop[1])}

    def test_ranks_assigned(self):
        objs = [vec(1, 1, 1), vec(2, 2, 2), vec(3, 3, 3), vec(4, 4, 4)]
        pop = _make_pop(objs)
        environmental_select(pop, 4, reference_points(3, 4),
                             np.random.default_rng(0))
        assert [c.rank for c in pop] == [1, 2, 3, 4]

    def test_niching_spreads_duplicates(self):
        # front of 6 mutually non-dominated points, pick 4: niching should
        # favor spread across reference directions over clustering
        objs = [vec(1, 0, 0), vec(0, 1, 0), vec(0, 0, 1),
                vec(0.9, 0.05, 0.05), vec(0.05, 0.9, 0.05), vec(0.34, 0.33, 0.33)]
        pop = _make_pop(objs)
        out = environmental_select(pop, 4, reference_points(3, 4),
                                   np.random.default_rng(1))
        assert len(out) == 4
        assert len({id(c) for c in out}) == 4

    def test_pool_too_small(self):
        pop = _make_pop([vec(1, 1, 1)])
        with pytest.raises(ValueError):
            environmental_select(pop, 2, reference_points(3, 4),
                                 np.random.default_rng(0))

    def test_deterministic(self):
        rng_objs = np.random.default_rng(3)
        objs = [vec(*rng_objs.uniform(0, 1, 3)) for _ in range(20)]
        pop = _make_pop(objs)
        a = environmental_select(list(pop), 8, reference_points(3, 6),
                                 np.random.default_rng(42))
        b = environmental_select(list(pop), 8, reference_points(3, 6),
                                 np.random.default_rng(42))
        assert [id(c) for c in a] == [id(c) for c in b]


class TestTournament:
    def test_lower_rank_always_wins(self):
        pop = _make_pop([vec(1, 1, 1), vec(2, 2, 2)])
        pop[0].rank, pop[1].rank = 1, 2
        winners = tournament_select(pop, 200, seed=0)
        for w in winners:
            # whenever both are drawn, rank 1 wins; self-pairings keep rank
            assert w.rank in (1, 2)
        assert sum(w.rank == 1 for w in winners) > 100

    def test_uniform_among_equal_ranks(self):
        pop = _make_pop([vec(1, 2, 3), vec(3, 2, 1), vec(2, 2, 2)])
        for c in pop:
            c.rank = 1
        n = 100_000
        winners = tournament_select(pop, n, seed=1)
        counts = np.array([sum(w is c for w in winners) for c in pop])
        # each candidate should win ~ n/3; 5 sigma binomial bound
        expect = n / 3
        sigma = math.sqrt(n * (1 / 3) * (2 / 3))
        assert np.all(np.abs(counts - expect) < 5 * sigma)

    def test_requires_ranks(self):
        pop = _make_pop([vec(1, 1, 1), vec(2, 2, 2)])
        with pytest.raises(ValueError):
            tournament_select(pop, 4, seed=0)


class TestDiversityMetric:
    def test_single_member_zero(self):
        assert diversity_metric(_make_pop([vec(1, 1, 1)])) == 0.0

    def test_two_extremes(self):
        # normalized to corners (0,0,0) and (1,1,1): distance sqrt(3)
        pop = _make_pop([vec(0, 0, 0), vec(5, 5, 5)])
        assert diversity_metric(pop) == pytest.approx(math.sqrt(3))


class TestRunConfig:
    def test_odd_population_rejected(self):
        with pytest.raises(ValueError):
            RunConfig(population=5)

    def test_bad_probability_rejected(self):
        with pytest.raises(ValueError):
            RunConfig(p_crossover=1.5)


@pytest.fixture(scope="module")
def small_problem():
    train = synth_ppg_dataset([60, 70, 80, 90, 100, 110], 4.0, 125.0, 0.02, seed=0)
    refset = build_reference_set(train, SsaConfig(100, 2))
    x = synth_ppg(72, 4.0, 125.0, 0.02, seed=5).series
    regressor = SpectralRateRegressor()
    return x, refset, regressor


class TestRun:
    def test_smoke_and_archive_feasibility(self, small_problem):
        x, refset, regressor = small_problem
        archive = run(x, TargetSpec(90.0, 5.0), MorphSpec(), refset, regressor,
                      RunConfig(population=12, generations=4, seed=7), gamma=20)
        assert len(archive.per_generation_stats) == 4
        for c in archive.all_feasible:
            assert c.objective.feasible
            assert abs(c.prediction - 90.0) <= 5.0

    def test_final_front_is_rank_one(self, small_problem):
        x, refset, regressor = small_problem
        archive = run(x, TargetSpec(90.0, 5.0), MorphSpec(), refset, regressor,
                      RunConfig(population=12, generations=3, seed=8), gamma=20)
        assert archive.final_front
        assert all(c.rank == 1 for c in archive.final_front)

    def test_hypervolume_monotone(self, small_problem):
        x, refset, regressor = small_problem
        archive = run(x, TargetSpec(90.0, 5.0), MorphSpec(), refset, regressor,
                      RunConfig(population=12, generations=6, seed=9), gamma=20)
        hv = [s.hypervolume for s in archive.per_generation_stats]
        assert all(b >= a - 1e-12 for a, b in zip(hv, hv[1:]))

    def test_archive_size_monotone(self, small_problem):
        x, refset, regressor = small_problem
        archive = run(x, TargetSpec(90.0, 5.0), MorphSpec(), refset, regressor,
                      RunConfig(population=12, generations=6, seed=10), gamma=20)
        sizes = [s.archive_size for s in archive.per_generation_stats]
        assert sizes == sorted(sizes)

    def test_deterministic(self, small_problem):
        x, refset, regressor = small_problem
        cfg = RunConfig(population=12, generations=3, seed=11)
        a = run(x, TargetSpec(90.0, 5.0), MorphSpec(), refset, regressor, cfg,
                gamma=20)
        b = run(x, TargetSpec(90.0, 5.0), MorphSpec(), refset, regressor, cfg,
                gamma=20)
        assert len(a) == len(b)
        for ca, cb in zip(a.all_feasible, b.all_feasible):
            np.testing.assert_array_equal(ca.waveform.values, cb.waveform.values)
        for sa, sb in zip(a.per_generation_stats, b.per_generation_stats):
            assert sa.csv_row() == sb.csv_row()

    def test_seed_changes_outcome(self, small_problem):
        x, refset, regressor = small_problem
        a = run(x, TargetSpec(90.0, 5.0), MorphSpec(), refset, regressor,
                RunConfig(population=12, generations=3, seed=12), gamma=20)
        b = run(x, TargetSpec(90.0, 5.0), MorphSpec(), refset, regressor,
                RunConfig(population=12, generations=3, seed=13), gamma=20)
        rows_a = [s.csv_row() for s in a.per_generation_stats]
        rows_b = [s.csv_row() for s in b.per_generation_stats]
        assert rows_a != rows_b


class TestCfeArchive:
    def test_deduplicates_waveforms(self):
        archive = CfeArchive()
        s = make_series(np.arange(10.0))
        c1 = Candidate(s, 3, objective=vec(1, 1, 0))
        c2 = Candidate(s.with_values(s.values.copy()), 3, objective=vec(2, 2, 0))
        archive.add(c1)
        archive.add(c2)
        assert len(archive) == 1

    def test_ignores_infeasible(self):
        archive = CfeArchive()
        archive.add(Candidate(make_series(np.arange(10.0)), 3,
                              objective=vec(1, 1, 5, feasible=False)))
        assert len(archive) == 0

    def test_front_maintenance(self):
        archive = CfeArchive()
        pts = [(3, 3, 0), (1, 1, 0), (0.5, 2, 0), (2, 0.5, 0), (0.6, 2.5, 0)]
        for i, p in enumerate(pts):
            archive.add(Candidate(make_series(np.full(8, float(i))), 2,
                                  objective=vec(*p)))
        front = {tuple(r) for r in archive.front_objectives}
        assert front == {(1, 1, 0), (0.5, 2, 0), (2, 0.5, 0)}
