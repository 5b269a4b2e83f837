"""LSTM autoencoder model object and its forward/backward surface.

The encoder stacks LSTM layers (default hidden 16/8/4) over a window of
sensor channels; the final top-layer hidden state is the latent vector. The
decoder mirrors the encoder (4/8/16), fed the latent tiled over all
timesteps, and a per-timestep linear projection maps the top decoder hidden
state to the scored sensor channels. The loss covers scored channels only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch
from . import kernels
from .layout import ModelLayout


@dataclass(frozen=True)
class LstmLayerParams:
    """One LSTM layer: input weights (in, 4H), recurrent weights (H, 4H),
    bias (4H,), gate slices ordered [forget, input, candidate, output]."""

    wx: np.ndarray
    wh: np.ndarray
    b: np.ndarray

    @property
    def in_dim(self) -> int:
        return self.wx.shape[0]

    @property
    def hidden_dim(self) -> int:
        return self.wh.shape[0]


def lstm_cell_forward(x_t: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray,
                      params: LstmLayerParams) -> tuple[np.ndarray, np.ndarray]:
    """Single LSTM step: returns (h_t, c_t)."""
    hd = params.hidden_dim
    if x_t.shape != (params.in_dim,) or h_prev.shape != (hd,) or c_prev.shape != (hd,):
        raise DimensionMismatch(
            f"x {x_t.shape}, h {h_prev.shape}, c {c_prev.shape} vs "
            f"layer ({params.in_dim}, {hd})")
    a = params.b + x_t @ params.wx + h_prev @ params.wh
    f = 1.0 / (1.0 + np.exp(-a[:hd]))
    i = 1.0 / (1.0 + np.exp(-a[hd:2 * hd]))
    g = np.tanh(a[2 * hd:3 * hd])
    o = 1.0 / (1.0 + np.exp(-a[3 * hd:4 * hd]))
    c_t = f * c_prev + i * g
    h_t = o * np.tanh(c_t)
    return h_t, c_t


@dataclass
class AutoencoderModel:
    layout: ModelLayout
    theta: np.ndarray
    rng_seed: int
    history: dict = field(default_factory=dict)

    @classmethod
    def initialize(cls, layout: ModelLayout, seed: int) -> "AutoencoderModel":
        return cls(layout=layout, theta=layout.init_params(seed), rng_seed=seed)

    def layer(self, l: int) -> LstmLayerParams:
        wx, wh, b = self.layout.layer_views(self.theta, l)
        return LstmLayerParams(wx=wx, wh=wh, b=b)

    def projection(self) -> tuple[np.ndarray, np.ndarray]:
        return self.layout.projection_views(self.theta)


def _check_window(window: np.ndarray, layout: ModelLayout):
    if window.shape != (layout.in_channels, layout.window):
        raise DimensionMismatch(
            f"window shape {window.shape}, expected "
            f"({layout.in_channels}, {layout.window})")


def encode(window: np.ndarray, model: AutoencoderModel) -> np.ndarray:
    """Latent vector (length = bottleneck dim) for one window."""
    _check_window(window, model.layout)
    return encode_batch(window[None, :, :], model)[0]


def encode_batch(windows: np.ndarray, model: AutoencoderModel) -> np.ndarray:
    lay = model.layout
    if windows.ndim != 3 or windows.shape[1] != lay.in_channels:
        raise DimensionMismatch(f"windows shape {windows.shape}")
    return kernels.encode_batch(
        np.ascontiguousarray(windows, dtype=np.float64), model.theta,
        lay.layer_in, lay.layer_hidden, lay.offsets)


def decode(latent: np.ndarray, model: AutoencoderModel) -> np.ndarray:
    """Reconstruction (scored_channels, w) from one latent vector."""
    lay = model.layout
    if latent.shape != (lay.latent_dim,):
        raise DimensionMismatch(f"latent shape {latent.shape}, expected ({lay.latent_dim},)")
    return decode_batch(latent[None, :], model)[0]


def decode_batch(latents: np.ndarray, model: AutoencoderModel) -> np.ndarray:
    lay = model.layout
    if latents.ndim != 2 or latents.shape[1] != lay.latent_dim:
        raise DimensionMismatch(f"latents shape {latents.shape}")
    return kernels.decode_batch(
        np.ascontiguousarray(latents, dtype=np.float64), model.theta,
        lay.layer_in, lay.layer_hidden, lay.offsets,
        lay.scored_channels, lay.window)


def reconstruct(window: np.ndarray, model: AutoencoderModel) -> np.ndarray:
    return decode(encode(window, model), model)


def reconstruct_batch(windows: np.ndarray, model: AutoencoderModel) -> np.ndarray:
    return decode_batch(encode_batch(windows, model), model)


def reconstruction_loss(window_sensors: np.ndarray, reconstruction: np.ndarray) -> float:
    """Window-level mean-squared error over the scored channels."""
    if window_sensors.shape != reconstruction.shape:
        raise DimensionMismatch(
            f"{window_sensors.shape} vs {reconstruction.shape}")
    return float(np.mean((window_sensors - reconstruction) ** 2))


def batch_loss_and_grad(windows: np.ndarray, model: AutoencoderModel) -> tuple[float, np.ndarray]:
    """Mean window MSE over the batch and its gradient w.r.t. flat theta."""
    lay = model.layout
    if windows.ndim != 3 or windows.shape[1:] != (lay.in_channels, lay.window):
        raise DimensionMismatch(f"windows shape {windows.shape}")
    return kernels.loss_grad_batch(
        np.ascontiguousarray(windows, dtype=np.float64), model.theta,
        lay.layer_in, lay.layer_hidden, lay.offsets, lay.scored_channels)


def backward(window: np.ndarray, model: AutoencoderModel) -> dict:
    """Exact gradients of reconstruction_loss for one window, keyed per layer."""
    _check_window(window, model.layout)
    _, flat = batch_loss_and_grad(window[None, :, :], model)
    return unpack_gradients(flat, model.layout)


def unpack_gradients(flat: np.ndarray, layout: ModelLayout) -> dict:
    out = {}
    for l in range(layout.n_layers):
        wx, wh, b = layout.layer_views(flat, l)
        out[f"layer{l}"] = {"wx": wx, "wh": wh, "b": b}
    wp, bp = layout.projection_views(flat)
    out["projection"] = {"w": wp, "b": bp}
    return out


def save_model(model: AutoencoderModel) -> dict:
    """JSON-ready document with nested row-major weight arrays."""
    lay = model.layout
    layers = []
    for l in range(lay.n_layers):
        wx, wh, b = lay.layer_views(model.theta, l)
        layers.append({"wx": wx.tolist(), "wh": wh.tolist(), "b": b.tolist()})
    wp, bp = lay.projection_views(model.theta)
    return {
        "architecture": {
            "in_channels": lay.in_channels,
            "scored_channels": lay.scored_channels,
            "window": lay.window,
            "encoder_hidden": list(lay.encoder_hidden),
        },
        "layers": layers,
        "projection": {"w": wp.tolist(), "b": bp.tolist()},
        "rng_seed": model.rng_seed,
        "history": model.history,
    }


def load_model(doc: dict) -> AutoencoderModel:
    arch = doc["architecture"]
    lay = ModelLayout(
        in_channels=arch["in_channels"],
        scored_channels=arch["scored_channels"],
        window=arch["window"],
        encoder_hidden=tuple(arch["encoder_hidden"]),
    )
    theta = np.zeros(lay.n_params)
    for l, layer in enumerate(doc["layers"]):
        wx, wh, b = lay.layer_views(theta, l)
        wx[:] = np.asarray(layer["wx"], dtype=np.float64)
        wh[:] = np.asarray(layer["wh"], dtype=np.float64)
        b[:] = np.asarray(layer["b"], dtype=np.float64)
    wp, bp = lay.projection_views(theta)
    wp[:] = np.asarray(doc["projection"]["w"], dtype=np.float64)
    bp[:] = np.asarray(doc["projection"]["b"], dtype=np.float64)
    return AutoencoderModel(layout=lay, theta=theta, rng_seed=doc["rng_seed"],
                            history=doc.get("history", {}))
