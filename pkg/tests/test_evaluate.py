import numpy as np
import pytest

from sentinel.detector import ScoreSeries, ThresholdModel, calibrate_threshold, score_windows
from sentinel.errors import EmptyEvaluation, LabelMismatch
from sentinel.evaluate import (
    ConfusionCounts,
    compute_metrics,
    cross_tabulate,
    degraded_boundary,
    evaluate_subset,
    label_windows,
)
from sentinel.ingest import FleetDataset
from sentinel.nn.layout import ModelLayout
from sentinel.nn.training import TrainConfig, train_autoencoder
from sentinel.preprocess import PartitionSpec, fit_normalizer, healthy_windows

from synth import drift_fleet


class TestLabels:
    def test_boundary_200(self):
        assert degraded_boundary(200, 0.10) == 180

    def test_boundary_10(self):
        assert degraded_boundary(10, 0.10) == 9

    def test_ceil_guarantees_positive_class(self):
        for length in range(10, 400, 7):
            assert degraded_boundary(length, 0.10) < length

    def test_window_inherits_last_cycle_label(self):
        series = ScoreSeries(unit_ids=np.array([1, 1]),
                             cycles=np.array([180, 181]),
                             scores=np.zeros(2))
        labels = label_windows(series, {1: 200}, 0.10)
        assert labels.tolist() == [False, True]

    def test_unknown_unit(self):
        series = ScoreSeries(unit_ids=np.array([9]), cycles=np.array([10]),
                             scores=np.zeros(1))
        with pytest.raises(LabelMismatch):
            label_windows(series, {1: 200}, 0.10)


class TestConfusion:
    def test_enumeration(self):
        alerts = np.array([True, True, False, True])
        labels = np.array([True, False, False, True])
        c = cross_tabulate(alerts, labels)
        assert (c.tp, c.fp, c.tn, c.fn) == (2, 1, 1, 0)

    def test_all_alert_all_degraded(self):
        c = cross_tabulate(np.ones(5, dtype=bool), np.ones(5, dtype=bool))
        assert (c.fp, c.tn, c.fn) == (0, 0, 0) and c.tp == 5

    def test_no_alerts(self):
        c = cross_tabulate(np.zeros(4, dtype=bool),
                           np.array([True, False, True, False]))
        assert c.tp == 0 and c.fp == 0 and c.fn == 2 and c.tn == 2

    def test_count_conservation(self):
        rng = np.random.default_rng(0)
        alerts, labels = rng.random(100) > 0.5, rng.random(100) > 0.8
        assert cross_tabulate(alerts, labels).total == 100

    def test_shape_mismatch(self):
        with pytest.raises(LabelMismatch):
            cross_tabulate(np.zeros(3, dtype=bool), np.zeros(4, dtype=bool))


class TestMetrics:
    def test_high_recall_profile(self):
        m = compute_metrics(ConfusionCounts(tp=2, fp=8, tn=90, fn=0))
        assert m.precision == pytest.approx(0.200, abs=1e-12)
        assert m.recall == pytest.approx(1.000, abs=1e-12)
        assert m.specificity == pytest.approx(90 / 98, abs=1e-12)
        assert m.f1 == pytest.approx(2 * 0.2 / 1.2, abs=1e-12)

    def test_perfect_detector(self):
        m = compute_metrics(ConfusionCounts(tp=10, fp=0, tn=90, fn=0))
        assert (m.precision, m.recall, m.specificity, m.f1) == (1.0, 1.0, 1.0, 1.0)

    def test_zero_denominator_conventions(self):
        m = compute_metrics(ConfusionCounts(tp=0, fp=0, tn=5, fn=3))
        assert m.precision == 0.0 and m.recall == 0.0 and m.f1 == 0.0

    def test_specificity_convention(self):
        m = compute_metrics(ConfusionCounts(tp=3, fp=0, tn=0, fn=0))
        assert m.specificity == 1.0

    def test_anomaly_share(self):
        m = compute_metrics(ConfusionCounts(tp=2, fp=8, tn=80, fn=10))
        assert m.anomaly_share == pytest.approx(12 / 100, abs=1e-12)

    def test_bounds_and_harmonic_cap(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            tp, fp, tn, fn = rng.integers(0, 50, 4)
            if tp + fp + tn + fn == 0:
                continue
            m = compute_metrics(ConfusionCounts(int(tp), int(fp), int(tn), int(fn)))
            for v in (m.precision, m.recall, m.specificity, m.f1, m.anomaly_share):
                assert 0.0 <= v <= 1.0
            assert m.f1 <= 2 * min(m.precision, m.recall) + 1e-12

    def test_empty(self):
        with pytest.raises(EmptyEvaluation):
            compute_metrics(ConfusionCounts())


@pytest.fixture(scope="module")
def trained_synthetic():
    dataset = drift_fleet(n_units=6, length=120, seed=11)
    part = PartitionSpec()
    norm = fit_normalizer(dataset, part, mode="minmax")
    windows = healthy_windows(dataset, part, norm)
    model = train_autoencoder(windows.windows, ModelLayout(),
                              TrainConfig(rng_seed=4, max_epochs=80))
    series = score_windows(windows, model)
    threshold = calibrate_threshold(series.scores, lam=2.5, k=1)
    return dataset, norm, model, threshold, part


class TestEvaluateSubset:
    def test_detects_synthetic_drift(self, trained_synthetic):
        dataset, norm, model, threshold, part = trained_synthetic
        report = evaluate_subset(dataset, norm, model, threshold, part)
        assert report.metrics.recall >= 0.9
        assert report.metrics.specificity >= 0.9

    def test_count_conservation(self, trained_synthetic):
        dataset, norm, model, threshold, part = trained_synthetic
        report = evaluate_subset(dataset, norm, model, threshold, part)
        expected_windows = sum(len(t) - 10 + 1 for t in dataset.trajectories)
        assert report.counts.total == expected_windows

    def test_unit_order_invariance(self, trained_synthetic):
        dataset, norm, model, threshold, part = trained_synthetic
        shuffled = FleetDataset(dataset.subset_id, dataset.split_kind,
                                list(reversed(dataset.trajectories)))
        r1 = evaluate_subset(dataset, norm, model, threshold, part)
        r2 = evaluate_subset(shuffled, norm, model, threshold, part)
        assert r1.metrics == r2.metrics
        assert r1.counts == r2.counts

    def test_first_alert_after_full_window(self, trained_synthetic):
        dataset, norm, model, threshold, part = trained_synthetic
        report = evaluate_subset(dataset, norm, model, threshold, part)
        for unit in report.units:
            if unit.first_alert_cycle is not None:
                assert unit.first_alert_cycle >= 10
