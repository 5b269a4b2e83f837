"""Command-line pipeline: ingest -> train -> detect / evaluate.

Exit codes: 0 success, 2 I/O, 3 parse, 4 training failure,
5 missing artifact, 6 config digest mismatch.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import PipelineConfig, read_artifact, write_artifact
from .detector import ThresholdModel, calibrate_threshold, detect, series_to_csv
from .errors import (
    ConfigMismatch,
    MalformedRow,
    MissingArtifact,
    NonContiguousCycles,
    SentinelError,
)
from .evaluate import REPORT_CSV_HEADER, evaluate_subset, report_csv_row
from .ingest import dataset_summary, parse_cmapss
from .nn.autoencoder import load_model, save_model
from .nn.layout import ModelLayout
from .nn.training import train_autoencoder
from .preprocess import Normalizer, fit_normalizer, healthy_windows

EXIT_IO = 2
EXIT_PARSE = 3
EXIT_TRAINING = 4
EXIT_MISSING_ARTIFACT = 5
EXIT_CONFIG_MISMATCH = 6


def _fail(code: int, message: str):
    click.echo(f"sentinel: {message}", err=True)
    sys.exit(code)


def _load_config(config_path: str, **overrides) -> PipelineConfig:
    try:
        return PipelineConfig.from_file(config_path, **overrides)
    except FileNotFoundError:
        _fail(EXIT_IO, f"config file not found: {config_path}")
    except (ValueError, json.JSONDecodeError) as exc:
        _fail(EXIT_IO, f"bad config: {exc}")


def _parse_split(config: PipelineConfig, split_kind: str):
    path = config.data_file(split_kind)
    try:
        with open(path) as fh:
            return parse_cmapss(fh, config.subset_id, split_kind)
    except FileNotFoundError:
        _fail(EXIT_IO, f"data file not found: {path}")
    except (MalformedRow, NonContiguousCycles) as exc:
        _fail(EXIT_PARSE, f"{path}: {exc}")


def _read_required(path: Path) -> dict:
    if not path.exists():
        _fail(EXIT_MISSING_ARTIFACT, f"missing artifact: {path}")
    return read_artifact(path)


def _check_digest(doc: dict, config: PipelineConfig, path: Path):
    if doc.get("config_digest") != config.digest():
        _fail(EXIT_CONFIG_MISMATCH,
              f"{path} was produced by a different config "
              f"({doc.get('config_digest')} != {config.digest()})")


def _load_artifacts(config: PipelineConfig):
    norm_doc = _read_required(config.artifact_path("normalizer"))
    model_doc = _read_required(config.artifact_path("model"))
    thresh_doc = _read_required(config.artifact_path("threshold"))
    for doc, kind in ((norm_doc, "normalizer"), (model_doc, "model"),
                      (thresh_doc, "threshold")):
        _check_digest(doc, config, config.artifact_path(kind))
    normalizer = Normalizer.from_dict(norm_doc)
    model = load_model(model_doc)
    threshold = ThresholdModel.from_dict(thresh_doc)
    return normalizer, model, threshold


_config_option = click.option("--config", "config_path", required=True,
                              type=click.Path(), help="Flat JSON config file.")


@click.group()
def main():
    """Early-fault detection pipeline for turbofan sensor trajectories."""


@main.command()
@_config_option
@click.option("--subset", default=None, help="Subset id (FD001..FD004).")
def ingest(config_path, subset):
    """Parse data files and persist a structural summary."""
    config = _load_config(config_path, subset_id=subset)
    train = _parse_split(config, "train")
    summary = {"train": dataset_summary(train)}
    test_path = config.data_file("test")
    if test_path.exists():
        summary["test"] = dataset_summary(_parse_split(config, "test"))
    write_artifact(config.artifact_path("summary"), summary, config.digest())
    click.echo(f"{config.subset_id}: {summary['train']['unit_count']} train units")


@main.command()
@_config_option
@click.option("--subset", default=None)
@click.option("--lambda", "lam", type=float, default=None, help="Threshold multiplier.")
@click.option("--k", type=int, default=None, help="Persistence length.")
@click.option("--seed", type=int, default=None)
def train(config_path, subset, lam, k, seed):
    """Fit normalizer, train the autoencoder, calibrate the threshold."""
    config = _load_config(config_path, subset_id=subset, lam=lam, k=k, rng_seed=seed)
    dataset = _parse_split(config, "train")
    try:
        normalizer = fit_normalizer(dataset, config.partition,
                                    mode=config.normalization_mode,
                                    seed=config.rng_seed,
                                    window_length=config.window)
        windows = healthy_windows(dataset, config.partition, normalizer,
                                  w=config.window, stride=config.stride)
        layout = ModelLayout(window=config.window,
                             encoder_hidden=config.encoder_hidden)
        model = train_autoencoder(windows.windows, layout, config.train_config())
        from .detector import score_windows
        series = score_windows(windows, model)
        threshold = calibrate_threshold(series.scores, lam=config.lam, k=config.k)
    except FloatingPointError as exc:
        _fail(EXIT_TRAINING, f"training failed: {exc}")
    except SentinelError as exc:
        _fail(EXIT_TRAINING, f"training failed: {exc}")

    digest = config.digest()
    write_artifact(config.artifact_path("normalizer"), normalizer.to_dict(), digest)
    write_artifact(config.artifact_path("model"), save_model(model), digest)
    write_artifact(config.artifact_path("threshold"), threshold.to_dict(), digest)
    click.echo(f"{config.subset_id}: trained on {len(windows)} windows, "
               f"tau={threshold.tau:.6g} "
               f"(best epoch {model.history['best_epoch']})")


@main.command(name="detect")
@_config_option
@click.option("--subset", default=None)
@click.option("--unit", type=int, default=None, help="Restrict to one unit.")
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--k", type=int, default=None)
def detect_cmd(config_path, subset, unit, lam, k):
    """Write per-window score CSVs (the reconstruction-error curve data)."""
    config = _load_config(config_path, subset_id=subset)
    normalizer, model, threshold = _load_artifacts(config)
    if lam is not None:
        threshold = threshold.with_lambda(lam)
    k = config.k if k is None else k
    dataset = _parse_split(config, "train")
    if unit is not None:
        try:
            trajectories = [dataset.unit(unit)]
        except KeyError:
            _fail(EXIT_MISSING_ARTIFACT, f"unit {unit} not in {config.subset_id}")
    else:
        trajectories = dataset.trajectories
    from .preprocess import full_segment, segment_windows
    out_dir = Path(config.artifact_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for traj in trajectories:
        batch = segment_windows(full_segment(traj), normalizer,
                                w=config.window, stride=config.stride)
        series = detect(batch, model, threshold, k=k)
        path = out_dir / f"scores_{config.subset_id}_unit{traj.unit_id}.csv"
        path.write_text(series_to_csv(series, threshold.tau))
    click.echo(f"wrote {len(trajectories)} score CSV(s) to {out_dir}")


@main.command()
@_config_option
@click.option("--subset", default=None)
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--k", type=int, default=None)
def evaluate(config_path, subset, lam, k):
    """Cross-tabulate detector output against the 90/10 labels."""
    config = _load_config(config_path, subset_id=subset)
    normalizer, model, threshold = _load_artifacts(config)
    if lam is not None:
        threshold = threshold.with_lambda(lam)
    k = config.k if k is None else k
    dataset = _parse_split(config, "train")
    report = evaluate_subset(dataset, normalizer, model, threshold,
                             config.partition, w=config.window,
                             stride=config.stride, k=k)
    report.config_digest = config.digest()
    write_artifact(config.artifact_path("report"), report.to_dict(), config.digest())
    config.artifact_path("report", "csv").write_text(
        REPORT_CSV_HEADER + "\n" + report_csv_row(report) + "\n")
    m = report.metrics
    click.echo(f"{config.subset_id}: precision={m.precision:.3f} "
               f"recall={m.recall:.3f} specificity={m.specificity:.3f} "
               f"f1={m.f1:.3f}")


if __name__ == "__main__":
    main()
