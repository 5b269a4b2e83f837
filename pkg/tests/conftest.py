import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make tests/synth.py importable

from sentinel.ingest import parse_cmapss
from sentinel.nn.layout import ModelLayout


def cmapss_data_dir() -> Path | None:
    """Directory with the official train_FD00x.txt files, if present.

    Set CMAPSS_DATA_DIR to point at a local copy; tests that need the
    official files skip when it is absent.
    """
    candidates = [os.environ.get("CMAPSS_DATA_DIR"), "data"]
    for c in candidates:
        if c and Path(c, "train_FD001.txt").exists():
            return Path(c)
    return None


def require_cmapss() -> Path:
    d = cmapss_data_dir()
    if d is None:
        pytest.skip("official CMAPSS data files not available "
                    "(set CMAPSS_DATA_DIR to enable)")
    return d


def load_subset(subset_id: str, split_kind: str = "train"):
    d = require_cmapss()
    with open(d / f"{split_kind}_{subset_id}.txt") as fh:
        return parse_cmapss(fh, subset_id, split_kind)


@pytest.fixture
def tiny_layout():
    return ModelLayout(in_channels=3, scored_channels=3, window=4,
                       encoder_hidden=(3, 2, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(42)
