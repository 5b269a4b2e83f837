"""Pipeline configuration: flat JSON file, CLI overrides, artifact digests."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

from . import __version__
from .ingest import SUBSET_IDS
from .nn.training import TrainConfig
from .preprocess import PartitionSpec, default_mode


@dataclass
class PipelineConfig:
    data_dir: str = "data"
    artifact_dir: str = "artifacts"
    subset_id: str = "FD001"
    train_frac: float = 0.85
    degraded_frac: float = 0.10
    normalization: str = "auto"   # auto -> regression for FD002/FD004, minmax otherwise
    window: int = 10
    stride: int = 1
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    max_epochs: int = 300
    patience: int = 10
    batch_size: int = 64
    validation_frac: float = 0.20
    min_delta: float = 1e-7
    clip_norm: float = 5.0
    encoder_hidden: tuple[int, ...] = (16, 8, 4)
    lam: float = 2.5
    k: int = 1
    rng_seed: int = 0

    # JSON key -> field name, for keys whose spelling differs
    _ALIASES = {"subset": "subset_id", "lambda": "lam", "seed": "rng_seed"}

    def __post_init__(self):
        if self.subset_id not in SUBSET_IDS:
            raise ValueError(f"unknown subset {self.subset_id!r}")
        self.encoder_hidden = tuple(self.encoder_hidden)

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "PipelineConfig":
        """Load flat JSON config; keyword overrides (CLI flags) win."""
        doc = json.loads(Path(path).read_text())
        kwargs = {}
        for key, value in doc.items():
            name = cls._ALIASES.get(key, key)
            if name not in cls.__dataclass_fields__:
                raise ValueError(f"unknown config key {key!r}")
            kwargs[name] = value
        for key, value in overrides.items():
            if value is not None:
                kwargs[key] = value
        return cls(**kwargs)

    @property
    def partition(self) -> PartitionSpec:
        return PartitionSpec(train_frac=self.train_frac, degraded_frac=self.degraded_frac)

    @property
    def normalization_mode(self) -> str:
        if self.normalization == "auto":
            return default_mode(self.subset_id)
        return self.normalization

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate, beta1=self.beta1, beta2=self.beta2,
            eps=self.eps, max_epochs=self.max_epochs, patience=self.patience,
            batch_size=self.batch_size, validation_frac=self.validation_frac,
            min_delta=self.min_delta, clip_norm=self.clip_norm,
            rng_seed=self.rng_seed)

    def digest(self) -> str:
        """Digest of everything that determines the trained artifacts.

        Paths and detection-time knobs (lambda, k) are excluded: artifacts
        are relocatable, and lambda/k are applied at scoring time from the
        stored calibration statistics.
        """
        fields = asdict(self)
        for skip in ("data_dir", "artifact_dir", "lam", "k"):
            fields.pop(skip)
        fields["normalization"] = self.normalization_mode
        fields["encoder_hidden"] = list(self.encoder_hidden)
        blob = json.dumps(fields, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def data_file(self, split_kind: str) -> Path:
        return Path(self.data_dir) / f"{split_kind}_{self.subset_id}.txt"

    def artifact_path(self, kind: str, suffix: str = "json") -> Path:
        return Path(self.artifact_dir) / f"{kind}_{self.subset_id}.{suffix}"


def write_artifact(path: Path, doc: dict, digest: str) -> None:
    doc = dict(doc)
    doc["config_digest"] = digest
    doc["toolkit_version"] = __version__
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def read_artifact(path: Path) -> dict:
    return json.loads(path.read_text())
