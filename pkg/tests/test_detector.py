import numpy as np
import pytest

from sentinel.detector import (
    CSV_HEADER,
    ScoreSeries,
    ThresholdModel,
    apply_threshold,
    calibrate_threshold,
    persistence_filter,
    score_windows,
    series_to_csv,
)
from sentinel.errors import InsufficientScores
from sentinel.nn.autoencoder import AutoencoderModel, reconstruct, reconstruction_loss
from sentinel.nn.layout import ModelLayout
from sentinel.preprocess import WindowBatch


def _series(scores, units=None):
    scores = np.asarray(scores, dtype=np.float64)
    units = np.asarray(units if units is not None else np.ones(len(scores)),
                       dtype=np.int64)
    return ScoreSeries(unit_ids=units, cycles=np.arange(1, len(scores) + 1),
                       scores=scores)


class TestCalibration:
    def test_tau_formula(self):
        rng = np.random.default_rng(0)
        scores = rng.normal(0.1, 0.02, 1000)
        th = calibrate_threshold(scores, lam=2.5)
        assert th.mu == pytest.approx(scores.mean(), abs=1e-15)
        assert th.sigma == pytest.approx(scores.std(ddof=1), abs=1e-15)
        assert th.tau - (th.mu + 2.5 * th.sigma) == pytest.approx(0.0, abs=1e-12)

    def test_example_values(self):
        # two scores with mean 0.10, sample std 0.02
        scores = np.array([0.10 - 0.02 / np.sqrt(2), 0.10 + 0.02 / np.sqrt(2)])
        th = calibrate_threshold(scores, lam=2.5)
        assert th.mu == pytest.approx(0.10, abs=1e-12)
        assert th.sigma == pytest.approx(0.02, abs=1e-12)
        assert th.tau == pytest.approx(0.15, abs=1e-12)

    def test_lambda_zero(self):
        th = calibrate_threshold(np.array([0.1, 0.2, 0.3]), lam=0.0)
        assert th.tau == pytest.approx(th.mu, abs=1e-15)

    def test_degenerate_sigma_warns(self):
        with pytest.warns(UserWarning):
            th = calibrate_threshold(np.full(10, 0.5), lam=2.5)
        assert th.sigma == 0.0
        assert th.tau > th.mu

    def test_insufficient_scores(self):
        with pytest.raises(InsufficientScores):
            calibrate_threshold(np.array([0.1]))


class TestThresholding:
    def test_strict_inequality(self):
        th = ThresholdModel(mu=0.1, sigma=0.02, lam=2.5, tau=0.15)
        s = apply_threshold(_series([0.15, 0.15 + 1e-15, 0.1]), th)
        assert s.over_threshold.tolist() == [False, True, False]

    def test_monotone_scores_give_suffix(self):
        th = ThresholdModel(mu=0.0, sigma=1.0, lam=1.0, tau=1.0)
        s = apply_threshold(_series(np.linspace(0, 2, 20)), th)
        flags = s.over_threshold
        first = np.argmax(flags)
        assert np.all(flags[first:])
        assert not np.any(flags[:first])

    def test_lambda_monotonicity(self):
        rng = np.random.default_rng(1)
        scores = rng.exponential(1.0, 500)
        th = calibrate_threshold(scores, lam=1.0)
        flagged = None
        for lam in (1.0, 1.5, 2.0, 2.5):
            s = apply_threshold(_series(scores), th.with_lambda(lam))
            now = set(np.flatnonzero(s.over_threshold))
            if flagged is not None:
                assert now <= flagged
            flagged = now


class TestPersistence:
    def _run(self, flags, k, units=None):
        s = _series(np.zeros(len(flags)), units=units)
        s.over_threshold = np.asarray(flags, dtype=bool)
        return persistence_filter(s, k).alerts.tolist()

    def test_five_consecutive(self):
        assert self._run([1, 1, 1, 1, 1], k=5) == [False, False, False, False, True]

    def test_interrupted_run(self):
        assert self._run([1, 1, 0, 1, 1], k=3) == [False] * 5

    def test_k_one_identity(self):
        flags = [1, 0, 1, 1, 0]
        assert self._run(flags, k=1) == [bool(f) for f in flags]

    def test_never_crosses_unit_boundary(self):
        units = [1, 1, 1, 2, 2, 2]
        alerts = self._run([1, 1, 1, 1, 1, 1], k=3, units=units)
        assert alerts == [False, False, True, False, False, True]

    def test_k_monotonicity(self):
        rng = np.random.default_rng(2)
        flags = rng.random(200) > 0.4
        prev = None
        for k in (1, 3, 5):
            alerts = set(np.flatnonzero(self._run(flags.tolist(), k)))
            if prev is not None:
                assert alerts <= prev
            prev = alerts

    def test_alert_implies_flag(self):
        rng = np.random.default_rng(3)
        flags = (rng.random(100) > 0.5).tolist()
        alerts = self._run(flags, k=2)
        for a, f in zip(alerts, flags):
            assert not a or f


class TestScoring:
    def test_scores_match_reconstruction_loss(self, rng):
        model = AutoencoderModel.initialize(ModelLayout(), seed=0)
        windows = rng.normal(size=(5, 24, 10))
        batch = WindowBatch(windows=windows,
                            unit_ids=np.ones(5, dtype=np.int64),
                            last_cycles=np.arange(10, 15, dtype=np.int64))
        series = score_windows(batch, model)
        for i in range(5):
            expected = reconstruction_loss(windows[i, :21, :],
                                           reconstruct(windows[i], model))
            assert series.scores[i] == expected  # bit-exact, same code path

    def test_sorted_by_unit_then_cycle(self, rng):
        model = AutoencoderModel.initialize(ModelLayout(), seed=0)
        windows = rng.normal(size=(4, 24, 10))
        batch = WindowBatch(windows=windows,
                            unit_ids=np.array([2, 1, 2, 1]),
                            last_cycles=np.array([11, 12, 10, 11]))
        series = score_windows(batch, model)
        assert series.unit_ids.tolist() == [1, 1, 2, 2]
        assert series.cycles.tolist() == [11, 12, 10, 11]


def test_csv_format():
    s = _series([0.5, 1.5])
    s.over_threshold = np.array([False, True])
    s.alerts = np.array([False, True])
    text = series_to_csv(s, tau=1.0)
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER == "unit,cycle,score,tau,over_threshold,alert"
    assert lines[1] == "1,1,0.5,1.0,False,False"
    assert lines[2] == "1,2,1.5,1.0,True,True"
