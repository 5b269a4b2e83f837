"""Synthetic fleet generators: ground truth that does not depend on any
real data files."""

from __future__ import annotations

import numpy as np

from sentinel.ingest import Trajectory, FleetDataset

FD001_SETTINGS = np.array([-0.0007, -0.0004, 100.0])

# six discrete operating regimes in the 3-d settings space
REGIMES = np.array([
    [0.0, 0.0, 100.0],
    [10.0, 0.25, 100.0],
    [20.0, 0.7, 100.0],
    [25.0, 0.62, 60.0],
    [35.0, 0.84, 60.0],
    [42.0, 0.84, 40.0],
])


def drift_fleet(n_units: int = 20, length: int = 200, seed: int = 2024,
                drift_channels: tuple[int, ...] = (0, 5, 11, 17),
                degraded_frac: float = 0.10) -> FleetDataset:
    """Stationary seeded noise per sensor; the final degraded_frac of cycles
    carries a monotone drift of >= 3 healthy standard deviations on the
    selected channels. Operating settings mimic a single-regime subset."""
    rng = np.random.default_rng(seed)
    base = rng.uniform(-10.0, 10.0, 21)
    sig = rng.uniform(0.5, 2.0, 21)
    n_degraded = int(np.ceil(degraded_frac * length))
    onset = length - n_degraded  # 0-based row index of first degraded cycle
    trajectories = []
    for unit in range(1, n_units + 1):
        sensors = base + rng.normal(size=(length, 21)) * sig
        for row in range(onset, length):
            ramp = 4.0 + 6.0 * (row - onset + 1) / n_degraded  # monotone, >= 3 sigma
            for j in drift_channels:
                sensors[row, j] += sig[j] * ramp
        ops = np.tile(FD001_SETTINGS, (length, 1))
        trajectories.append(Trajectory(unit, ops, sensors))
    return FleetDataset("FD001", "train", trajectories)


def multi_regime_fleet(n_units: int = 6, length: int = 150,
                       seed: int = 99) -> FleetDataset:
    """Sensors dominated by a regime-dependent offset plus noise, mimicking a
    multi-condition subset; used to exercise regression normalization."""
    rng = np.random.default_rng(seed)
    # per-sensor response to each regime, plus noise
    regime_effect = rng.uniform(-5.0, 5.0, (len(REGIMES), 21))
    base = rng.uniform(-10.0, 10.0, 21)
    sig = rng.uniform(0.1, 0.3, 21)
    trajectories = []
    for unit in range(1, n_units + 1):
        which = rng.integers(0, len(REGIMES), size=length)
        ops = REGIMES[which] + rng.normal(size=(length, 3)) * 0.01
        sensors = base + regime_effect[which] + rng.normal(size=(length, 21)) * sig
        trajectories.append(Trajectory(unit, ops, sensors))
    return FleetDataset("FD002", "train", trajectories)


def write_cmapss_file(dataset: FleetDataset, path) -> None:
    from sentinel.ingest import serialize_cmapss
    path.write_text(serialize_cmapss(dataset))
