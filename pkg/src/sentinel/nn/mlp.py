"""Small MLP regressor: operating-condition settings -> expected sensor value.

One hidden tanh layer, linear output, trained with the shared Adam optimizer
and early stopping on a held-out row fraction. Inputs and target are
standardized internally; predictions are returned in original units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InsufficientData
from .adam import AdamState, adam_step


@dataclass
class MlpRegressor:
    in_dim: int
    hidden_dim: int
    theta: np.ndarray
    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: float
    y_std: float
    fit_loss: float = math.nan

    def n_params(self) -> int:
        return self.theta.shape[0]

    def _views(self, vec: np.ndarray):
        d, h = self.in_dim, self.hidden_dim
        w1 = vec[: d * h].reshape(d, h)
        b1 = vec[d * h: d * h + h]
        w2 = vec[d * h + h: d * h + 2 * h]
        b2 = vec[d * h + 2 * h]
        return w1, b1, w2, b2

    def predict(self, x: np.ndarray) -> np.ndarray:
        """x: (n, in_dim) -> (n,) predictions in original target units."""
        w1, b1, w2, b2 = self._views(self.theta)
        z = np.tanh((x - self.x_mean) / self.x_std @ w1 + b1)
        return (z @ w2 + b2) * self.y_std + self.y_mean

    def to_dict(self) -> dict:
        w1, b1, w2, b2 = self._views(self.theta)
        return {
            "in_dim": self.in_dim,
            "hidden_dim": self.hidden_dim,
            "w1": w1.tolist(), "b1": b1.tolist(),
            "w2": w2.tolist(), "b2": float(b2),
            "x_mean": self.x_mean.tolist(), "x_std": self.x_std.tolist(),
            "y_mean": self.y_mean, "y_std": self.y_std,
            "fit_loss": self.fit_loss,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MlpRegressor":
        d, h = doc["in_dim"], doc["hidden_dim"]
        theta = np.empty(d * h + 2 * h + 1)
        theta[: d * h] = np.asarray(doc["w1"]).ravel()
        theta[d * h: d * h + h] = doc["b1"]
        theta[d * h + h: d * h + 2 * h] = doc["w2"]
        theta[d * h + 2 * h] = doc["b2"]
        return cls(in_dim=d, hidden_dim=h, theta=theta,
                   x_mean=np.asarray(doc["x_mean"], dtype=np.float64),
                   x_std=np.asarray(doc["x_std"], dtype=np.float64),
                   y_mean=doc["y_mean"], y_std=doc["y_std"],
                   fit_loss=doc["fit_loss"])


def _loss_grad(theta, xs, ys, d, h):
    """MSE loss and gradient for a standardized batch."""
    w1 = theta[: d * h].reshape(d, h)
    b1 = theta[d * h: d * h + h]
    w2 = theta[d * h + h: d * h + 2 * h]
    b2 = theta[d * h + 2 * h]
    z = np.tanh(xs @ w1 + b1)
    pred = z @ w2 + b2
    err = pred - ys
    n = len(ys)
    loss = float(np.mean(err ** 2))
    dpred = 2.0 * err / n
    grad = np.empty_like(theta)
    grad[d * h + 2 * h] = dpred.sum()
    grad[d * h + h: d * h + 2 * h] = z.T @ dpred
    dz = np.outer(dpred, w2) * (1.0 - z * z)
    grad[: d * h] = (xs.T @ dz).ravel()
    grad[d * h: d * h + h] = dz.sum(axis=0)
    return loss, grad


def fit_mlp_regressor(x: np.ndarray, y: np.ndarray, hidden_dim: int = 16,
                      max_epochs: int = 200, patience: int = 10,
                      holdout_frac: float = 0.20, batch_size: int = 32,
                      learning_rate: float = 1e-3, seed: int = 0) -> MlpRegressor:
    """Fit predicted-sensor-value model on healthy rows.

    Raises InsufficientData when there are fewer rows than parameters.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    n, d = x.shape
    n_params = d * hidden_dim + 2 * hidden_dim + 1
    if n < n_params:
        raise InsufficientData(f"{n} rows < {n_params} parameters")

    x_mean = x.mean(axis=0)
    x_std = np.maximum(x.std(axis=0), 1e-8)
    y_mean = float(y.mean())
    y_std = max(float(y.std()), 1e-8)
    xs = (x - x_mean) / x_std
    ys = (y - y_mean) / y_std

    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_val = max(1, math.floor(holdout_frac * n))
    val_i, train_i = perm[:n_val], perm[n_val:]

    theta = rng.uniform(-1.0 / math.sqrt(d), 1.0 / math.sqrt(d), n_params)
    theta[d * hidden_dim:] = 0.0
    theta[d * hidden_dim + hidden_dim: d * hidden_dim + 2 * hidden_dim] = rng.uniform(
        -1.0 / math.sqrt(hidden_dim), 1.0 / math.sqrt(hidden_dim), hidden_dim)
    state = AdamState.zeros(n_params)

    best_theta = theta.copy()
    best_val = math.inf
    since_best = 0
    n_train = len(train_i)
    for _epoch in range(max_epochs):
        order = rng.permutation(n_train)
        for start in range(0, n_train, batch_size):
            idx = train_i[order[start:start + batch_size]]
            _, grad = _loss_grad(theta, xs[idx], ys[idx], d, hidden_dim)
            theta = adam_step(theta, grad, state, lr=learning_rate)
        val_loss, _ = _loss_grad(theta, xs[val_i], ys[val_i], d, hidden_dim)
        if val_loss < best_val - 1e-9:
            best_val = val_loss
            best_theta = theta.copy()
            since_best = 0
        else:
            since_best += 1
            if since_best >= patience:
                break

    model = MlpRegressor(in_dim=d, hidden_dim=hidden_dim, theta=best_theta,
                         x_mean=x_mean, x_std=x_std, y_mean=y_mean, y_std=y_std)
    model.fit_loss = float(np.mean((model.predict(x) - y) ** 2))
    return model
