import json

import numpy as np
import pytest

from morphcf.metrics import (EvalReport, NunNotFoundError, evaluate_cfe_set,
                             frequency_sparsity, kl_divergence, nun_baseline,
                             plausibility, proximity, temporal_sparsity,
                             temporal_sparsity_fraction, validity)
from morphcf.nsga3 import CfeArchive
from morphcf.objectives import ObjectiveVector, TargetSpec
from morphcf.operators import Candidate
from morphcf.series import Dataset, LabeledSeries, synth_ppg_dataset
from morphcf.signal_ops import dtw

from conftest import make_series


class ConstRegressor:
    def __init__(self, value):
        self.value = value

    def predict(self, x):
        return self.value


class TestValidity:
    def test_two_of_three(self):
        assert validity([88.0, 91.0, 99.0], TargetSpec(90.0, 5.0)) == pytest.approx(2 / 3)

    def test_boundary_counts(self):
        assert validity([95.0], TargetSpec(90.0, 5.0)) == 1.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            validity([], TargetSpec(90.0))


class TestPlausibility:
    def _train(self):
        rng = np.random.default_rng(0)
        items = []
        for i, label in enumerate([60, 70, 80, 90, 100]):
            items.append(LabeledSeries(make_series(rng.normal(size=32) + i * 10),
                                       float(label)))
        return Dataset(items)

    def test_k1_nearest_agrees(self):
        train = self._train()
        q = train[2].series
        assert plausibility(q, 80.0, train, k=1, delta=5.0) == 1.0

    def test_k1_nearest_disagrees(self):
        train = self._train()
        q = train[2].series
        assert plausibility(q, 60.0, train, k=1, delta=5.0) == 0.0

    def test_fractional(self):
        # k=5 neighbors labeled 60..100; yhat=75, delta=10 admits {70, 80}
        train = self._train()
        q = train[2].series
        assert plausibility(q, 75.0, train, k=5, delta=10.0) == pytest.approx(0.4)

    def test_k_bounds(self):
        train = self._train()
        with pytest.raises(ValueError):
            plausibility(train[0].series, 60.0, train, k=6)


class TestProximity:
    def test_identical_is_zero(self):
        s = make_series(np.arange(20.0))
        assert proximity(s, s) == 0.0

    def test_matches_dtw_over_length(self):
        rng = np.random.default_rng(1)
        a = make_series(rng.normal(size=40))
        b = make_series(rng.normal(size=40))
        assert proximity(a, b) == pytest.approx(dtw(a, b) / 40)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            proximity(make_series(np.zeros(5)), make_series(np.zeros(6)))


class TestTemporalSparsity:
    def test_two_segments(self):
        x = make_series(np.zeros(10))
        v = np.zeros(10)
        v[[2, 3]] = 1.0
        v[[7]] = 1.0
        assert temporal_sparsity(x, x.with_values(v)) == 2

    def test_no_difference(self):
        x = make_series(np.zeros(10))
        assert temporal_sparsity(x, x) == 0

    def test_edit_at_origin_counts(self):
        x = make_series(np.zeros(6))
        v = np.zeros(6)
        v[0] = 1.0
        assert temporal_sparsity(x, x.with_values(v)) == 1

    def test_below_atol_ignored(self):
        x = make_series(np.zeros(8))
        v = np.full(8, 1e-12)
        assert temporal_sparsity(x, x.with_values(v)) == 0

    def test_fraction(self):
        x = make_series(np.zeros(10))
        v = np.zeros(10)
        v[:3] = 1.0
        assert temporal_sparsity_fraction(x, x.with_values(v)) == pytest.approx(0.3)


class TestFrequencySparsity:
    def test_kl_kernel_hand_value(self):
        # 0.5*ln(0.5/0.9) + 0.5*ln(0.5/0.1) = 0.5108...
        assert kl_divergence([0.5, 0.5], [0.9, 0.1]) == pytest.approx(0.5108, abs=1e-3)

    def test_identical_spectra_zero(self, sine_bin40):
        assert frequency_sparsity(sine_bin40, sine_bin40) == pytest.approx(0.0, abs=1e-9)

    def test_nonnegative(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            a = make_series(rng.normal(size=100))
            b = make_series(rng.normal(size=100))
            assert frequency_sparsity(a, b) >= 0.0

    def test_spectral_shift_detected(self):
        t = np.arange(500)
        a = make_series(np.sin(2 * np.pi * 5 * t / 500))
        b = make_series(np.sin(2 * np.pi * 5 * t / 500)
                        + 0.5 * np.sin(2 * np.pi * 40 * t / 500))
        assert frequency_sparsity(a, b) > frequency_sparsity(a, a) + 1e-6

    def test_bad_bins_rejected(self, sine_bin40):
        with pytest.raises(ValueError):
            frequency_sparsity(sine_bin40, sine_bin40, n_bins=1)


class TestNunBaseline:
    def _train(self):
        rng = np.random.default_rng(3)
        items = [LabeledSeries(make_series(rng.normal(size=24) + i), 60.0 + 10 * i)
                 for i in range(5)]  # labels 60..100
        return Dataset(items)

    def test_returns_closest_in_interval(self):
        train = self._train()
        q = train[0].series  # nearest overall is item 0, but it's outside target
        out = nun_baseline(q, TargetSpec(95.0, 5.0), train)
        # eligible labels: 90, 100 (items 3, 4); item 3 is closer to item 0
        assert out.label == 90.0

    def test_raises_when_interval_empty(self):
        train = self._train()
        with pytest.raises(NunNotFoundError):
            nun_baseline(train[0].series, TargetSpec(200.0, 5.0), train)

    def test_exact_member_returned_when_eligible(self):
        train = self._train()
        out = nun_baseline(train[3].series, TargetSpec(90.0, 5.0), train)
        assert out is train[3]


def _archive_from(waveforms, objs):
    archive = CfeArchive()
    for w, o in zip(waveforms, objs):
        archive.add(Candidate(w, 4, objective=o))
    return archive


class TestEvaluateCfeSet:
    def test_empty_archive(self):
        train = synth_ppg_dataset([60, 80], 2.0, 125.0, 0.0, seed=0)
        rep = evaluate_cfe_set(train[0].series, TargetSpec(90.0), CfeArchive(),
                               train, ConstRegressor(90.0))
        assert rep.diversity == 0
        assert rep.validity is None

    def test_self_archive_perfect_scores(self):
        train = synth_ppg_dataset([60, 80, 90, 100], 2.0, 125.0, 0.0, seed=1)
        x = train[2].series
        obj = ObjectiveVector(0.0, 0.0, 0.0, True)
        archive = _archive_from([x], [obj])
        rep = evaluate_cfe_set(x, TargetSpec(90.0, 5.0), archive, train,
                               ConstRegressor(90.0), k=1)
        assert rep.validity == 1.0
        assert rep.proximity == pytest.approx(0.0)
        assert rep.temporal_sparsity_segments == 0.0
        assert rep.frequency_sparsity == pytest.approx(0.0, abs=1e-9)
        assert rep.plausibility == 1.0
        assert rep.diversity == 1

    def test_csv_round_trip_shape(self):
        rep = EvalReport(1.0, 0.5, 0.1, 2.0, 0.3, 0.01, 0.2, 7)
        row = rep.csv_row()
        assert len(row.split(",")) == len(EvalReport.CSV_HEADER.split(","))
        parsed = json.loads(rep.to_json())
        assert parsed["diversity"] == 7
