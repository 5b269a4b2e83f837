"""Flat parameter layout for the stacked-LSTM autoencoder.

All weights live in one contiguous float64 vector so the optimizer and the
gradient checker can treat the model as a single point in R^n. Per-layer
views are materialized on demand.

Layer order: encoder layers bottom-up, then decoder layers bottom-up, then
the per-timestep output projection. Each LSTM layer stores Wx (in, 4H),
Wh (H, 4H) and b (4H,) with gate slices [forget, input, candidate, output].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ModelLayout:
    in_channels: int = 24          # 21 normalized sensors + 3 op settings
    scored_channels: int = 21      # channels covered by the loss
    window: int = 10
    encoder_hidden: tuple[int, ...] = (16, 8, 4)

    layer_in: np.ndarray = field(init=False, repr=False)
    layer_hidden: np.ndarray = field(init=False, repr=False)
    offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        enc = list(self.encoder_hidden)
        dec = list(reversed(enc))
        lin = [self.in_channels] + enc[:-1] + [enc[-1]] + dec[:-1]
        lhid = enc + dec
        object.__setattr__(self, "layer_in", np.asarray(lin, dtype=np.int64))
        object.__setattr__(self, "layer_hidden", np.asarray(lhid, dtype=np.int64))

        # offsets: [Wx0, Wh0, b0, Wx1, ..., Wproj, bproj, total]
        offs = []
        pos = 0
        for d, h in zip(lin, lhid):
            offs.append(pos); pos += d * 4 * h
            offs.append(pos); pos += h * 4 * h
            offs.append(pos); pos += 4 * h
        offs.append(pos); pos += dec[-1] * self.scored_channels
        offs.append(pos); pos += self.scored_channels
        offs.append(pos)
        object.__setattr__(self, "offsets", np.asarray(offs, dtype=np.int64))

    @property
    def n_layers(self) -> int:
        return len(self.layer_hidden)

    @property
    def latent_dim(self) -> int:
        return self.encoder_hidden[-1]

    @property
    def n_params(self) -> int:
        return int(self.offsets[-1])

    def init_params(self, seed: int) -> np.ndarray:
        """Uniform ±1/sqrt(fan_in) weights, forget-gate bias 1, other biases 0."""
        rng = np.random.default_rng(seed)
        theta = np.zeros(self.n_params, dtype=np.float64)
        nl = self.n_layers
        for l in range(nl):
            d = int(self.layer_in[l]); h = int(self.layer_hidden[l])
            o = self.offsets
            theta[o[3 * l]: o[3 * l] + d * 4 * h] = rng.uniform(
                -1.0 / np.sqrt(d), 1.0 / np.sqrt(d), d * 4 * h)
            theta[o[3 * l + 1]: o[3 * l + 1] + h * 4 * h] = rng.uniform(
                -1.0 / np.sqrt(h), 1.0 / np.sqrt(h), h * 4 * h)
            theta[o[3 * l + 2]: o[3 * l + 2] + h] = 1.0  # forget gate
        dp = int(self.layer_hidden[-1])
        op = self.offsets[3 * nl]
        theta[op: op + dp * self.scored_channels] = rng.uniform(
            -1.0 / np.sqrt(dp), 1.0 / np.sqrt(dp), dp * self.scored_channels)
        return theta

    def layer_views(self, theta: np.ndarray, l: int):
        """(Wx, Wh, b) views into the flat vector for LSTM layer l."""
        d = int(self.layer_in[l]); h = int(self.layer_hidden[l])
        o = self.offsets
        wx = theta[o[3 * l]: o[3 * l] + d * 4 * h].reshape(d, 4 * h)
        wh = theta[o[3 * l + 1]: o[3 * l + 1] + h * 4 * h].reshape(h, 4 * h)
        b = theta[o[3 * l + 2]: o[3 * l + 2] + 4 * h]
        return wx, wh, b

    def projection_views(self, theta: np.ndarray):
        """(Wp, bp) views for the per-timestep output projection."""
        nl = self.n_layers
        dp = int(self.layer_hidden[-1])
        s = self.scored_channels
        op, ob = self.offsets[3 * nl], self.offsets[3 * nl + 1]
        return theta[op: op + dp * s].reshape(dp, s), theta[ob: ob + s]
