"""Healthy-only training loop with early stopping on a validation split."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from ..errors import InsufficientWindows
from .adam import AdamState, adam_step, clip_global_norm
from .autoencoder import (
    AutoencoderModel,
    batch_loss_and_grad,
    reconstruct_batch,
    reconstruction_loss,
)
from .layout import ModelLayout


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    max_epochs: int = 300
    patience: int = 10
    batch_size: int = 64
    validation_frac: float = 0.20
    min_delta: float = 1e-7        # validation MSE must drop by this to reset patience
    clip_norm: float = 5.0
    rng_seed: int = 0

    def __post_init__(self):
        assert 0.0 < self.validation_frac < 1.0
        assert self.patience >= 1

    def to_dict(self) -> dict:
        return asdict(self)


def mean_window_mse(windows: np.ndarray, model: AutoencoderModel) -> float:
    """Average reconstruction_loss over a batch, via the scoring path."""
    s = model.layout.scored_channels
    recons = reconstruct_batch(windows, model)
    losses = [reconstruction_loss(windows[i, :s, :], recons[i]) for i in range(len(windows))]
    return float(np.mean(losses))


def train_autoencoder(windows: np.ndarray, layout: ModelLayout,
                      config: TrainConfig) -> AutoencoderModel:
    """Train on healthy windows (N, channels, w); returns the best-validation
    snapshot with per-epoch history attached.

    Deterministic: the validation split, batch order, and initialization are
    all driven by config.rng_seed.
    """
    windows = np.ascontiguousarray(windows, dtype=np.float64)
    n = windows.shape[0]
    if n < 2:
        raise InsufficientWindows(f"{n} windows; need at least 2")

    rng = np.random.default_rng(config.rng_seed)
    perm = rng.permutation(n)
    n_val = math.floor(config.validation_frac * n)
    if n_val == 0:
        n_val = 1  # early stopping needs a validation signal
    val_idx = perm[:n_val]
    train_idx = perm[n_val:]
    val_windows = windows[val_idx]
    train_windows = windows[train_idx]

    model = AutoencoderModel.initialize(layout, config.rng_seed)
    state = AdamState.zeros(layout.n_params)

    best_theta = model.theta.copy()
    best_val = math.inf
    best_epoch = -1
    epochs_since_best = 0
    train_losses: list[float] = []
    val_losses: list[float] = []

    n_train = len(train_windows)
    for epoch in range(config.max_epochs):
        order = rng.permutation(n_train)
        epoch_loss = 0.0
        for start in range(0, n_train, config.batch_size):
            batch = train_windows[order[start:start + config.batch_size]]
            loss, grad = batch_loss_and_grad(batch, model)
            if not math.isfinite(loss):
                raise FloatingPointError(f"non-finite training loss at epoch {epoch}")
            grad = clip_global_norm(grad, config.clip_norm)
            model.theta = adam_step(model.theta, grad, state,
                                    lr=config.learning_rate, beta1=config.beta1,
                                    beta2=config.beta2, eps=config.eps)
            epoch_loss += loss * len(batch)
        train_losses.append(epoch_loss / n_train)

        val_loss = mean_window_mse(val_windows, model)
        val_losses.append(val_loss)
        if val_loss < best_val - config.min_delta:
            best_val = val_loss
            best_theta = model.theta.copy()
            best_epoch = epoch
            epochs_since_best = 0
        else:
            epochs_since_best += 1
            if epochs_since_best >= config.patience:
                break

    model.theta = best_theta
    model.history = {
        "train_loss": train_losses,
        "val_loss": val_losses,
        "best_epoch": best_epoch,
        "best_val_loss": mean_window_mse(val_windows, model),
        "stopped_epoch": len(train_losses) - 1,
        "n_train_windows": int(n_train),
        "n_val_windows": int(n_val),
        "config": config.to_dict(),
    }
    return model
