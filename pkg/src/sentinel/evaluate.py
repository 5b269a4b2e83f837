"""90/10 in-house labeling, confusion counts, and detection metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyEvaluation, LabelMismatch
from .detector import ScoreSeries, ThresholdModel, detect
from .ingest import FleetDataset
from .nn.autoencoder import AutoencoderModel
from .preprocess import Normalizer, PartitionSpec, full_segment, segment_windows


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


@dataclass(frozen=True)
class MetricSet:
    precision: float
    recall: float
    specificity: float
    f1: float
    anomaly_share: float

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall,
                "specificity": self.specificity, "f1": self.f1,
                "anomaly_share": self.anomaly_share}


def degraded_boundary(length: int, degraded_frac: float) -> int:
    """Last cycle labeled normal: the final ceil(frac*L) cycles are degraded."""
    return length - int(np.ceil(degraded_frac * length))


def label_windows(series: ScoreSeries, unit_lengths: dict[int, int],
                  degraded_frac: float = 0.10) -> np.ndarray:
    """True where a window is degraded. A window carries the label of its
    last cycle."""
    labels = np.zeros(len(series), dtype=bool)
    for i in range(len(series)):
        unit = int(series.unit_ids[i])
        if unit not in unit_lengths:
            raise LabelMismatch(f"unit {unit} missing from label population")
        labels[i] = series.cycles[i] > degraded_boundary(unit_lengths[unit], degraded_frac)
    return labels


def cross_tabulate(alerts: np.ndarray, labels: np.ndarray) -> ConfusionCounts:
    if alerts.shape != labels.shape:
        raise LabelMismatch(f"{alerts.shape} predictions vs {labels.shape} labels")
    return ConfusionCounts(
        tp=int(np.sum(labels & alerts)),
        fp=int(np.sum(~labels & alerts)),
        tn=int(np.sum(~labels & ~alerts)),
        fn=int(np.sum(labels & ~alerts)),
    )


def compute_metrics(counts: ConfusionCounts) -> MetricSet:
    """Zero-denominator conventions: precision 0, recall 0, specificity 1,
    f1 0 — never inflating a score."""
    if counts.total == 0:
        raise EmptyEvaluation("no windows evaluated")
    tp, fp, tn, fn = counts.tp, counts.fp, counts.tn, counts.fn
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    specificity = tn / (tn + fp) if tn + fp > 0 else 1.0
    f1 = (2.0 * precision * recall / (precision + recall)
          if precision + recall > 0 else 0.0)
    return MetricSet(precision=precision, recall=recall, specificity=specificity,
                     f1=f1, anomaly_share=(tp + fn) / counts.total)


@dataclass
class UnitOutcome:
    unit_id: int
    length: int
    boundary_cycle: int            # last cycle labeled normal
    first_alert_cycle: int | None  # None when the unit never alerts
    margin_cycles: int | None      # first alert minus boundary (negative = early)

    def to_dict(self) -> dict:
        return {"unit_id": self.unit_id, "length": self.length,
                "boundary_cycle": self.boundary_cycle,
                "first_alert_cycle": self.first_alert_cycle,
                "margin_cycles": self.margin_cycles}


@dataclass
class DetectionReport:
    subset_id: str
    counts: ConfusionCounts
    metrics: MetricSet
    units: list[UnitOutcome] = field(default_factory=list)
    lam: float = 2.5
    k: int = 1
    config_digest: str = ""

    def to_dict(self) -> dict:
        return {
            "subset": self.subset_id,
            "config_digest": self.config_digest,
            "lambda": self.lam,
            "k": self.k,
            "confusion": self.counts.to_dict(),
            "metrics": self.metrics.to_dict(),
            "units": [u.to_dict() for u in self.units],
        }


def evaluate_subset(dataset: FleetDataset, normalizer: Normalizer,
                    model: AutoencoderModel, threshold: ThresholdModel,
                    partition: PartitionSpec, w: int = 10, stride: int = 1,
                    k: int | None = None) -> DetectionReport:
    """Score every window of every complete trajectory, apply threshold and
    persistence, and cross-tabulate against the 90/10 labels."""
    k = threshold.k if k is None else k
    all_counts = ConfusionCounts()
    units: list[UnitOutcome] = []
    tp = fp = tn = fn = 0
    for traj in dataset.trajectories:
        batch = segment_windows(full_segment(traj), normalizer, w=w, stride=stride)
        series = detect(batch, model, threshold, k=k)
        labels = label_windows(series, {traj.unit_id: len(traj)},
                               partition.degraded_frac)
        c = cross_tabulate(series.alerts, labels)
        tp += c.tp; fp += c.fp; tn += c.tn; fn += c.fn
        boundary = degraded_boundary(len(traj), partition.degraded_frac)
        alert_idx = np.flatnonzero(series.alerts)
        first_alert = int(series.cycles[alert_idx[0]]) if alert_idx.size else None
        units.append(UnitOutcome(
            unit_id=traj.unit_id, length=len(traj), boundary_cycle=boundary,
            first_alert_cycle=first_alert,
            margin_cycles=None if first_alert is None else first_alert - boundary))
    all_counts = ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)
    return DetectionReport(subset_id=dataset.subset_id, counts=all_counts,
                           metrics=compute_metrics(all_counts), units=units,
                           lam=threshold.lam, k=k)


REPORT_CSV_HEADER = "subset,precision,recall,specificity,f1,anomaly_share,tp,fp,tn,fn"


def report_csv_row(report: DetectionReport) -> str:
    m, c = report.metrics, report.counts
    return (f"{report.subset_id},{m.precision:.6f},{m.recall:.6f},"
            f"{m.specificity:.6f},{m.f1:.6f},{m.anomaly_share:.6f},"
            f"{c.tp},{c.fp},{c.tn},{c.fn}")
