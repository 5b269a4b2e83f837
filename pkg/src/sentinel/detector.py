"""Reconstruction-error scoring, threshold calibration, and persistence
filtering."""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import InsufficientScores
from .nn.autoencoder import AutoencoderModel, reconstruct_batch, reconstruction_loss
from .preprocess import WindowBatch

SIGMA_ZERO_EPS = 1e-9


@dataclass(frozen=True)
class ThresholdModel:
    """tau = mu + lam * sigma over healthy training-window scores."""

    mu: float
    sigma: float
    lam: float
    tau: float
    k: int = 1

    def to_dict(self) -> dict:
        return {"mu": self.mu, "sigma": self.sigma, "lambda": self.lam,
                "tau": self.tau, "k": self.k}

    @classmethod
    def from_dict(cls, doc: dict) -> "ThresholdModel":
        return cls(mu=doc["mu"], sigma=doc["sigma"], lam=doc["lambda"],
                   tau=doc["tau"], k=doc["k"])

    def with_lambda(self, lam: float) -> "ThresholdModel":
        return replace(self, lam=lam, tau=self.mu + lam * self.sigma)


@dataclass
class ScoreSeries:
    """Per-window results, sorted by (unit_id, last_cycle)."""

    unit_ids: np.ndarray
    cycles: np.ndarray          # last cycle of each window
    scores: np.ndarray
    over_threshold: np.ndarray | None = None
    alerts: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.scores)

    def unit_slice(self, unit_id: int) -> np.ndarray:
        return np.flatnonzero(self.unit_ids == unit_id)


def score_windows(batch: WindowBatch, model: AutoencoderModel) -> ScoreSeries:
    """Anomaly score per window: MSE between the window's scored channels and
    its reconstruction (same code path as reconstruction_loss)."""
    s = model.layout.scored_channels
    recons = reconstruct_batch(batch.windows, model)
    scores = np.array([
        reconstruction_loss(batch.windows[i, :s, :], recons[i])
        for i in range(len(batch))
    ])
    order = np.lexsort((batch.last_cycles, batch.unit_ids))
    return ScoreSeries(unit_ids=batch.unit_ids[order],
                       cycles=batch.last_cycles[order],
                       scores=scores[order])


def calibrate_threshold(training_scores: np.ndarray, lam: float = 2.5,
                        k: int = 1) -> ThresholdModel:
    """Sample mean/std (ddof=1) of training scores; tau = mu + lam*sigma.

    With zero spread tau degenerates to mu, so a tiny epsilon is added and a
    warning raised (constant scores indicate a broken model)."""
    scores = np.asarray(training_scores, dtype=np.float64)
    if scores.size < 2:
        raise InsufficientScores(f"{scores.size} scores; need at least 2")
    mu = float(scores.mean())
    sigma = float(scores.std(ddof=1))
    if sigma == 0.0:
        warnings.warn("degenerate calibration: all training scores identical")
        tau = mu + SIGMA_ZERO_EPS
    else:
        tau = mu + lam * sigma
    return ThresholdModel(mu=mu, sigma=sigma, lam=lam, tau=tau, k=k)


def apply_threshold(series: ScoreSeries, threshold: ThresholdModel) -> ScoreSeries:
    """Strict exceedance: flag = score > tau."""
    series.over_threshold = series.scores > threshold.tau
    return series


def persistence_filter(series: ScoreSeries, k: int) -> ScoreSeries:
    """Alert at a window iff it ends a run of >= k consecutive flagged windows
    of the same unit. k=1 reduces to the raw flags."""
    assert series.over_threshold is not None, "apply_threshold first"
    flags = series.over_threshold
    alerts = np.zeros(len(series), dtype=bool)
    run = 0
    prev_unit = None
    for i in range(len(series)):
        if series.unit_ids[i] != prev_unit:
            run = 0
            prev_unit = series.unit_ids[i]
        run = run + 1 if flags[i] else 0
        alerts[i] = run >= k
    series.alerts = alerts
    return series


def detect(batch: WindowBatch, model: AutoencoderModel,
           threshold: ThresholdModel, k: int | None = None) -> ScoreSeries:
    """Score, threshold, and persistence-filter one window batch."""
    series = score_windows(batch, model)
    apply_threshold(series, threshold)
    persistence_filter(series, threshold.k if k is None else k)
    return series


CSV_HEADER = "unit,cycle,score,tau,over_threshold,alert"


def series_to_csv(series: ScoreSeries, tau: float) -> str:
    """Per-cycle error-curve export (the data behind a reconstruction-error
    plot for one unit or several)."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for i in range(len(series)):
        over = bool(series.over_threshold[i]) if series.over_threshold is not None else False
        alert = bool(series.alerts[i]) if series.alerts is not None else False
        buf.write(f"{series.unit_ids[i]},{series.cycles[i]},"
                  f"{float(series.scores[i])!r},{float(tau)!r},{over},{alert}\n")
    return buf.getvalue()
