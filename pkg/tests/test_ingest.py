import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sentinel.errors import MalformedRow, NonContiguousCycles
from sentinel.ingest import (
    FleetDataset,
    Trajectory,
    dataset_summary,
    parse_cmapss,
    serialize_cmapss,
)


def _line(unit, cycle, values):
    return f"{unit} {cycle} " + " ".join(str(v) for v in values)


def _valid_lines(n_units=2, length=3):
    rng = np.random.default_rng(0)
    lines = []
    for u in range(1, n_units + 1):
        for c in range(1, length + 1):
            lines.append(_line(u, c, rng.normal(size=24).round(4)))
    return lines


def test_parse_basic():
    ds = parse_cmapss(iter(_valid_lines()), "FD001", "train")
    assert len(ds) == 2
    traj = ds.unit(1)
    assert len(traj) == 3
    assert traj.op_settings.shape == (3, 3)
    assert traj.sensors.shape == (3, 21)


def test_parse_first_record_values():
    line = _line(1, 1, [0.1, 0.2, 100.0] + list(range(21)))
    ds = parse_cmapss([line], "FD001", "train")
    traj = ds.unit(1)
    assert traj.op_settings[0].tolist() == [0.1, 0.2, 100.0]
    assert traj.sensors[0].tolist() == [float(i) for i in range(21)]


def test_wrong_field_count():
    bad = " ".join(["1"] * 25)
    with pytest.raises(MalformedRow) as err:
        parse_cmapss([bad], "FD001", "train")
    assert err.value.line_no == 1


def test_non_numeric_field():
    fields = ["1", "1"] + ["0.0"] * 23 + ["oops"]
    with pytest.raises(MalformedRow):
        parse_cmapss([" ".join(fields)], "FD001", "train")


def test_empty_stream():
    ds = parse_cmapss(io.StringIO(""), "FD001", "train")
    assert len(ds) == 0
    assert dataset_summary(ds)["unit_count"] == 0


def test_blank_lines_and_trailing_whitespace_tolerated():
    lines = [line + "  \n" for line in _valid_lines()] + ["\n", "  \n"]
    ds = parse_cmapss(lines, "FD001", "train")
    assert len(ds) == 2


def test_cycle_gap_rejected():
    lines = [_line(1, 1, [0.0] * 24), _line(1, 3, [0.0] * 24)]
    with pytest.raises(NonContiguousCycles):
        parse_cmapss(lines, "FD001", "train")


def test_duplicate_cycle_rejected():
    lines = [_line(1, 1, [0.0] * 24), _line(1, 1, [0.0] * 24)]
    with pytest.raises(NonContiguousCycles):
        parse_cmapss(lines, "FD001", "train")


def test_cycle_must_start_at_one():
    with pytest.raises(NonContiguousCycles):
        parse_cmapss([_line(1, 2, [0.0] * 24)], "FD001", "train")


@given(st.integers(1, 4), st.lists(st.integers(2, 8), min_size=1, max_size=4))
@settings(max_examples=25, deadline=None)
def test_round_trip(seed, lengths):
    rng = np.random.default_rng(seed)
    trajs = [
        Trajectory(u + 1, rng.normal(size=(n, 3)), rng.normal(size=(n, 21)))
        for u, n in enumerate(lengths)
    ]
    ds = FleetDataset("FD003", "train", trajs)
    again = parse_cmapss(io.StringIO(serialize_cmapss(ds)), "FD003", "train")
    assert again == ds


def test_summary_single_trajectory():
    rng = np.random.default_rng(1)
    ds = FleetDataset("FD001", "train",
                      [Trajectory(1, rng.normal(size=(5, 3)), rng.normal(size=(5, 21)))])
    s = dataset_summary(ds)
    assert s["min_length"] == s["max_length"] == s["mean_length"] == 5
    assert s["unit_count"] == 1
