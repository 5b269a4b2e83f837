"""Healthy/holdout partitioning, condition-effect removal, EDA statistics,
and sliding-window extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSplit, SegmentTooShort
from .ingest import FleetDataset, Trajectory, N_SENSORS, N_OP_SETTINGS, MULTI_REGIME_SUBSETS
from .nn.mlp import MlpRegressor, fit_mlp_regressor


@dataclass(frozen=True)
class PartitionSpec:
    """Healthy-prefix fraction and final degraded fraction; the gap between
    them (default 5%) is a buffer excluded from both."""

    train_frac: float = 0.85
    degraded_frac: float = 0.10

    def __post_init__(self):
        assert 0.0 < self.train_frac <= 1.0
        assert 0.0 <= self.degraded_frac <= 1.0
        assert self.train_frac + self.degraded_frac <= 1.0 + 1e-12

    def healthy_length(self, total: int) -> int:
        return math.floor(self.train_frac * total)

    def degraded_boundary(self, total: int) -> int:
        """Last cycle still labeled normal under the evaluation protocol."""
        return total - math.ceil(self.degraded_frac * total)


@dataclass(frozen=True)
class Segment:
    """A contiguous run of cycles from one trajectory."""

    unit_id: int
    first_cycle: int
    op_settings: np.ndarray  # (L, 3)
    sensors: np.ndarray      # (L, 21)

    def __len__(self) -> int:
        return self.op_settings.shape[0]

    @property
    def cycles(self) -> np.ndarray:
        return np.arange(self.first_cycle, self.first_cycle + len(self))


def partition_trajectory(traj: Trajectory, partition: PartitionSpec,
                         window_length: int = 10) -> tuple[Segment, Segment]:
    """Split into (healthy prefix, holdout remainder); their concatenation is
    the whole trajectory. Raises DegenerateSplit when the healthy prefix is
    shorter than one window."""
    total = len(traj)
    cut = partition.healthy_length(total)
    if cut < window_length:
        raise DegenerateSplit(
            f"unit {traj.unit_id}: healthy prefix {cut} < window {window_length}")
    healthy = Segment(traj.unit_id, 1, traj.op_settings[:cut], traj.sensors[:cut])
    holdout = Segment(traj.unit_id, cut + 1, traj.op_settings[cut:], traj.sensors[cut:])
    return healthy, holdout


def full_segment(traj: Trajectory) -> Segment:
    return Segment(traj.unit_id, 1, traj.op_settings, traj.sensors)


def fit_condition_regressor(op_settings: np.ndarray, sensor_values: np.ndarray,
                            seed: int = 0) -> MlpRegressor:
    """Model y_pred(settings) for one sensor channel, healthy rows only."""
    return fit_mlp_regressor(op_settings, sensor_values, seed=seed)


@dataclass
class Normalizer:
    """Per-sensor normalization fitted on healthy training segments.

    minmax mode: (x - x_min) / (x_max - x_min), no clipping; a constant
    sensor (x_max == x_min) maps to 0 everywhere.
    regression mode: x - y_pred(settings), then standardized by the healthy
    residual mean/std (std floored at 1e-8).
    """

    mode: str  # "minmax" | "regression"
    x_min: np.ndarray | None = None
    x_max: np.ndarray | None = None
    regressors: list[MlpRegressor] | None = None
    residual_mean: np.ndarray | None = None
    residual_std: np.ndarray | None = None
    fit_meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc = {"mode": self.mode, "fit_meta": self.fit_meta}
        if self.mode == "minmax":
            doc["x_min"] = self.x_min.tolist()
            doc["x_max"] = self.x_max.tolist()
        else:
            doc["regressors"] = [r.to_dict() for r in self.regressors]
            doc["residual_mean"] = self.residual_mean.tolist()
            doc["residual_std"] = self.residual_std.tolist()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Normalizer":
        if doc["mode"] == "minmax":
            return cls(mode="minmax",
                       x_min=np.asarray(doc["x_min"], dtype=np.float64),
                       x_max=np.asarray(doc["x_max"], dtype=np.float64),
                       fit_meta=doc.get("fit_meta", {}))
        return cls(mode="regression",
                   regressors=[MlpRegressor.from_dict(r) for r in doc["regressors"]],
                   residual_mean=np.asarray(doc["residual_mean"], dtype=np.float64),
                   residual_std=np.asarray(doc["residual_std"], dtype=np.float64),
                   fit_meta=doc.get("fit_meta", {}))


def default_mode(subset_id: str) -> str:
    return "regression" if subset_id in MULTI_REGIME_SUBSETS else "minmax"


def healthy_rows(dataset: FleetDataset, partition: PartitionSpec,
                 window_length: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """Stacked (op_settings, sensors) rows from all healthy segments."""
    ops, sens = [], []
    for traj in dataset.trajectories:
        healthy, _ = partition_trajectory(traj, partition, window_length)
        ops.append(healthy.op_settings)
        sens.append(healthy.sensors)
    return np.concatenate(ops, axis=0), np.concatenate(sens, axis=0)


def fit_normalizer(dataset: FleetDataset, partition: PartitionSpec, mode: str | None = None,
                   seed: int = 0, window_length: int = 10) -> Normalizer:
    """Fit statistics on healthy segments only."""
    if mode is None:
        mode = default_mode(dataset.subset_id)
    ops, sens = healthy_rows(dataset, partition, window_length)
    if mode == "minmax":
        return Normalizer(mode="minmax",
                          x_min=sens.min(axis=0), x_max=sens.max(axis=0),
                          fit_meta={"n_rows": int(len(sens))})
    if mode != "regression":
        raise ValueError(f"unknown mode {mode!r}")
    regressors = []
    res_mean = np.empty(N_SENSORS)
    res_std = np.empty(N_SENSORS)
    for j in range(N_SENSORS):
        reg = fit_condition_regressor(ops, sens[:, j], seed=seed + j)
        residual = sens[:, j] - reg.predict(ops)
        res_mean[j] = residual.mean()
        res_std[j] = max(residual.std(), 1e-8)
        regressors.append(reg)
    return Normalizer(mode="regression", regressors=regressors,
                      residual_mean=res_mean, residual_std=res_std,
                      fit_meta={"n_rows": int(len(sens)),
                                "fit_loss": [r.fit_loss for r in regressors]})


def apply_normalizer(segment: Segment, normalizer: Normalizer) -> np.ndarray:
    """Normalized sensor matrix (L, 21). Holdout values may leave [0, 1]."""
    x = segment.sensors
    if normalizer.mode == "minmax":
        span = normalizer.x_max - normalizer.x_min
        out = np.zeros_like(x)
        live = span > 0
        out[:, live] = (x[:, live] - normalizer.x_min[live]) / span[live]
        return out
    preds = np.column_stack([r.predict(segment.op_settings) for r in normalizer.regressors])
    return (x - preds - normalizer.residual_mean) / normalizer.residual_std


def inverse_minmax(normalized: np.ndarray, normalizer: Normalizer) -> np.ndarray:
    """Inverse of the minmax map on non-degenerate sensors."""
    assert normalizer.mode == "minmax"
    span = normalizer.x_max - normalizer.x_min
    return normalized * span + normalizer.x_min


@dataclass(frozen=True)
class StatsReport:
    variance: np.ndarray        # (21,)
    correlation: np.ndarray     # (21, 21); rows/cols of constant sensors are 0
    low_variance_sensors: list[int]  # 1-based sensor indices


def sensor_statistics(dataset: FleetDataset, partition: PartitionSpec,
                      low_var_tol: float = 1e-6,
                      window_length: int = 10) -> StatsReport:
    """Per-sensor variance and correlation over healthy rows.

    A sensor is low-variance when its variance relative to max(mean^2, 1)
    falls below low_var_tol. Correlations involving a zero-variance sensor
    are reported as 0.
    """
    _, sens = healthy_rows(dataset, partition, window_length)
    var = sens.var(axis=0)
    centered = sens - sens.mean(axis=0)
    std = np.sqrt(var)
    corr = np.zeros((N_SENSORS, N_SENSORS))
    live = std > 0
    if live.any():
        z = centered[:, live] / std[live]
        sub = (z.T @ z) / len(sens)
        corr[np.ix_(live, live)] = sub
    rel = var / np.maximum(sens.mean(axis=0) ** 2, 1.0)
    low = [int(j + 1) for j in range(N_SENSORS) if rel[j] < low_var_tol]
    return StatsReport(variance=var, correlation=corr, low_variance_sensors=low)


@dataclass(frozen=True)
class WindowBatch:
    """Stacked sliding windows: (N, channels, w) with channel layout
    21 normalized sensors then 3 op settings, plus per-window origin."""

    windows: np.ndarray      # (N, 24, w)
    unit_ids: np.ndarray     # (N,)
    last_cycles: np.ndarray  # (N,)

    def __len__(self) -> int:
        return self.windows.shape[0]

    @staticmethod
    def concatenate(batches: list["WindowBatch"]) -> "WindowBatch":
        return WindowBatch(
            windows=np.concatenate([b.windows for b in batches], axis=0),
            unit_ids=np.concatenate([b.unit_ids for b in batches]),
            last_cycles=np.concatenate([b.last_cycles for b in batches]),
        )


def make_windows(normalized: np.ndarray, op_settings: np.ndarray, unit_id: int,
                 first_cycle: int, w: int = 10, stride: int = 1) -> WindowBatch:
    """Cut sliding windows from one normalized segment.

    normalized: (L, 21); op_settings: (L, 3). Window t covers rows
    [t, t + w), its origin cycle is the cycle of its last row.
    """
    length = normalized.shape[0]
    if length < w:
        raise SegmentTooShort(f"segment length {length} < window {w}")
    channels = np.concatenate([normalized, op_settings], axis=1)  # (L, 24)
    starts = np.arange(0, length - w + 1, stride)
    windows = np.empty((len(starts), channels.shape[1], w))
    for k, s in enumerate(starts):
        windows[k] = channels[s:s + w].T
    last_cycles = starts + w - 1 + first_cycle
    return WindowBatch(windows=windows,
                       unit_ids=np.full(len(starts), unit_id, dtype=np.int64),
                       last_cycles=last_cycles.astype(np.int64))


def segment_windows(segment: Segment, normalizer: Normalizer,
                    w: int = 10, stride: int = 1) -> WindowBatch:
    return make_windows(apply_normalizer(segment, normalizer), segment.op_settings,
                        segment.unit_id, segment.first_cycle, w=w, stride=stride)


def healthy_windows(dataset: FleetDataset, partition: PartitionSpec, normalizer: Normalizer,
                    w: int = 10, stride: int = 1) -> WindowBatch:
    """All training windows: sliding windows over every healthy segment."""
    batches = []
    for traj in dataset.trajectories:
        healthy, _ = partition_trajectory(traj, partition, w)
        batches.append(segment_windows(healthy, normalizer, w=w, stride=stride))
    return WindowBatch.concatenate(batches)
