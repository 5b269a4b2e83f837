"""Parsing and serialization of the 26-column turbofan trajectory format.

One record per line: unit id, cycle, 3 operational settings, 21 sensor
readings, whitespace separated. Parsing is strict and all-or-nothing: the
first malformed row aborts the whole file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .errors import MalformedRow, NonContiguousCycles

N_OP_SETTINGS = 3
N_SENSORS = 21
N_FIELDS = 2 + N_OP_SETTINGS + N_SENSORS

SUBSET_IDS = ("FD001", "FD002", "FD003", "FD004")
MULTI_REGIME_SUBSETS = ("FD002", "FD004")


@dataclass(frozen=True)
class Trajectory:
    """One engine's complete time-ordered sensor history."""

    unit_id: int
    op_settings: np.ndarray  # (L, 3)
    sensors: np.ndarray      # (L, 21)

    def __post_init__(self):
        assert self.op_settings.shape == (len(self), N_OP_SETTINGS)
        assert self.sensors.shape == (len(self), N_SENSORS)

    def __len__(self) -> int:
        return self.op_settings.shape[0]

    @property
    def cycles(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Trajectory)
            and self.unit_id == other.unit_id
            and np.array_equal(self.op_settings, other.op_settings)
            and np.array_equal(self.sensors, other.sensors)
        )


@dataclass(frozen=True)
class FleetDataset:
    """All trajectories of one subset/split, keyed by unique unit id."""

    subset_id: str
    split_kind: str  # "train" | "test"
    trajectories: list[Trajectory] = field(default_factory=list)

    def __post_init__(self):
        ids = [t.unit_id for t in self.trajectories]
        assert len(ids) == len(set(ids)), "duplicate unit ids"

    def __len__(self) -> int:
        return len(self.trajectories)

    def unit(self, unit_id: int) -> Trajectory:
        for t in self.trajectories:
            if t.unit_id == unit_id:
                return t
        raise KeyError(unit_id)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FleetDataset)
            and self.subset_id == other.subset_id
            and self.split_kind == other.split_kind
            and self.trajectories == other.trajectories
        )


def parse_cmapss(stream: IO[str] | Iterable[str], subset_id: str, split_kind: str) -> FleetDataset:
    """Parse the official text format into a validated fleet dataset.

    Raises MalformedRow on the first bad line and NonContiguousCycles if any
    unit's cycles are not 1, 2, 3, ... in file order. Nothing is returned on
    failure (all-or-nothing).
    """
    per_unit: dict[int, list[list[float]]] = {}
    for line_no, line in enumerate(stream, start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != N_FIELDS:
            raise MalformedRow(line_no, f"expected {N_FIELDS} fields, got {len(fields)}")
        try:
            values = [float(f) for f in fields]
        except ValueError as exc:
            raise MalformedRow(line_no, str(exc)) from None
        unit_id = int(values[0])
        cycle = int(values[1])
        if unit_id <= 0 or values[0] != unit_id:
            raise MalformedRow(line_no, f"bad unit id {fields[0]}")
        if cycle <= 0 or values[1] != cycle:
            raise MalformedRow(line_no, f"bad cycle {fields[1]}")
        rows = per_unit.setdefault(unit_id, [])
        if cycle != len(rows) + 1:
            raise NonContiguousCycles(unit_id, f"expected cycle {len(rows) + 1}, got {cycle}")
        rows.append(values[2:])

    trajectories = []
    for unit_id, rows in per_unit.items():
        arr = np.asarray(rows, dtype=np.float64)
        trajectories.append(
            Trajectory(unit_id=unit_id, op_settings=arr[:, :N_OP_SETTINGS].copy(),
                       sensors=arr[:, N_OP_SETTINGS:].copy())
        )
    return FleetDataset(subset_id=subset_id, split_kind=split_kind, trajectories=trajectories)


def serialize_cmapss(dataset: FleetDataset) -> str:
    """Canonical text form: same column order, single-space separated."""
    lines = []
    for traj in dataset.trajectories:
        for i in range(len(traj)):
            fields = [str(traj.unit_id), str(i + 1)]
            fields += [repr(float(v)) for v in traj.op_settings[i]]
            fields += [repr(float(v)) for v in traj.sensors[i]]
            lines.append(" ".join(fields))
    return "\n".join(lines) + ("\n" if lines else "")


def dataset_summary(dataset: FleetDataset) -> dict:
    """Structural facts: unit count and trajectory-length statistics."""
    lengths = [len(t) for t in dataset.trajectories]
    return {
        "subset_id": dataset.subset_id,
        "split_kind": dataset.split_kind,
        "unit_count": len(dataset),
        "min_length": min(lengths) if lengths else 0,
        "max_length": max(lengths) if lengths else 0,
        "mean_length": float(np.mean(lengths)) if lengths else 0.0,
        "n_op_settings": N_OP_SETTINGS,
        "n_sensors": N_SENSORS,
    }
