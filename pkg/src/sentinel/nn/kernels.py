"""Hot numeric kernels for the stacked-LSTM autoencoder.

The kernels are written against a numba-compatible subset of numpy and are
jitted with @njit by default. Setting the environment variable
SENTINEL_NUMBA=0 (before import) selects the pure-numpy fallback: the same
source executed uninterpreted, which is slower but dependency-free and
byte-for-byte the same arithmetic. `benchmarks/bench_kernels.py` compares
the two paths.

Parameter layout (flat theta, offsets) is defined in layout.ModelLayout.
Windows are (N, channels, w) float64, C-contiguous.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("SENTINEL_NUMBA", "1").strip().lower()
_USE_NUMBA = _flag not in ("0", "false", "no", "off")
if _USE_NUMBA:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover
        _USE_NUMBA = False


def using_numba() -> bool:
    return _USE_NUMBA


def _maybe_jit(func):
    if _USE_NUMBA:
        return _njit(cache=True)(func)
    return func


@_maybe_jit
def encode_batch(windows, theta, lin, lhid, offs):
    """Run the encoder stack; return final top-layer hidden states (N, latent)."""
    n_batch = windows.shape[0]
    n_ch = windows.shape[1]
    w = windows.shape[2]
    nl = lin.shape[0]
    nenc = nl // 2
    lat_dim = lhid[nenc - 1]
    maxw = n_ch
    for l in range(nenc):
        if lhid[l] > maxw:
            maxw = lhid[l]
    latents = np.zeros((n_batch, lat_dim))
    for n in range(n_batch):
        xseq = np.zeros((w, maxw))
        for t in range(w):
            for i in range(n_ch):
                xseq[t, i] = windows[n, i, t]
        d_cur = n_ch
        for l in range(nenc):
            d = lin[l]
            hd = lhid[l]
            wx = theta[offs[3 * l]: offs[3 * l] + d * 4 * hd].reshape(d, 4 * hd)
            wh = theta[offs[3 * l + 1]: offs[3 * l + 1] + hd * 4 * hd].reshape(hd, 4 * hd)
            bias = theta[offs[3 * l + 2]: offs[3 * l + 2] + 4 * hd]
            h = np.zeros(hd)
            c = np.zeros(hd)
            yseq = np.zeros((w, maxw))
            for t in range(w):
                a = bias + np.dot(xseq[t, :d], wx) + np.dot(h, wh)
                f = 1.0 / (1.0 + np.exp(-a[:hd]))
                ig = 1.0 / (1.0 + np.exp(-a[hd:2 * hd]))
                g = np.tanh(a[2 * hd:3 * hd])
                og = 1.0 / (1.0 + np.exp(-a[3 * hd:4 * hd]))
                c = f * c + ig * g
                h = og * np.tanh(c)
                yseq[t, :hd] = h
            xseq = yseq
            d_cur = hd
        latents[n, :] = xseq[w - 1, :d_cur]
    return latents


@_maybe_jit
def decode_batch(latents, theta, lin, lhid, offs, n_score, w):
    """Run the decoder stack + projection on tiled latents; (N, n_score, w)."""
    n_batch = latents.shape[0]
    nl = lin.shape[0]
    nenc = nl // 2
    lat_dim = latents.shape[1]
    maxw = lat_dim
    for l in range(nenc, nl):
        if lhid[l] > maxw:
            maxw = lhid[l]
    dp = lhid[nl - 1]
    wp = theta[offs[3 * nl]: offs[3 * nl] + dp * n_score].reshape(dp, n_score)
    bp = theta[offs[3 * nl + 1]: offs[3 * nl + 1] + n_score]
    recons = np.zeros((n_batch, n_score, w))
    for n in range(n_batch):
        xseq = np.zeros((w, maxw))
        for t in range(w):
            xseq[t, :lat_dim] = latents[n, :]
        d_cur = lat_dim
        for l in range(nenc, nl):
            d = lin[l]
            hd = lhid[l]
            wx = theta[offs[3 * l]: offs[3 * l] + d * 4 * hd].reshape(d, 4 * hd)
            wh = theta[offs[3 * l + 1]: offs[3 * l + 1] + hd * 4 * hd].reshape(hd, 4 * hd)
            bias = theta[offs[3 * l + 2]: offs[3 * l + 2] + 4 * hd]
            h = np.zeros(hd)
            c = np.zeros(hd)
            yseq = np.zeros((w, maxw))
            for t in range(w):
                a = bias + np.dot(xseq[t, :d], wx) + np.dot(h, wh)
                f = 1.0 / (1.0 + np.exp(-a[:hd]))
                ig = 1.0 / (1.0 + np.exp(-a[hd:2 * hd]))
                g = np.tanh(a[2 * hd:3 * hd])
                og = 1.0 / (1.0 + np.exp(-a[3 * hd:4 * hd]))
                c = f * c + ig * g
                h = og * np.tanh(c)
                yseq[t, :hd] = h
            xseq = yseq
            d_cur = hd
        for t in range(w):
            recons[n, :, t] = bp + np.dot(xseq[t, :d_cur], wp)
    return recons


@_maybe_jit
def loss_grad_batch(windows, theta, lin, lhid, offs, n_score):
    """Mean per-window MSE over the batch and its gradient w.r.t. theta.

    The loss of one window covers the first n_score channels only:
    sum((x - xhat)^2) / (n_score * w). Returns (loss, grad) with grad the
    same length as theta.
    """
    n_batch = windows.shape[0]
    n_ch = windows.shape[1]
    w = windows.shape[2]
    nl = lin.shape[0]
    nenc = nl // 2
    lat_dim = lhid[nenc - 1]
    maxin = n_ch
    maxh = 0
    for l in range(nl):
        if lin[l] > maxin:
            maxin = lin[l]
        if lhid[l] > maxh:
            maxh = lhid[l]
    dp = lhid[nl - 1]
    wp = theta[offs[3 * nl]: offs[3 * nl] + dp * n_score].reshape(dp, n_score)
    bp = theta[offs[3 * nl + 1]: offs[3 * nl + 1] + n_score]

    grad = np.zeros(theta.shape[0])
    gwp = grad[offs[3 * nl]: offs[3 * nl] + dp * n_score].reshape(dp, n_score)
    gbp = grad[offs[3 * nl + 1]: offs[3 * nl + 1] + n_score]

    total_loss = 0.0
    denom = float(n_score * w)

    for n in range(n_batch):
        # ---- forward with full activation storage ----
        xs = np.zeros((nl, w, maxin))       # per-layer input sequences
        hs = np.zeros((nl, w + 1, maxh))    # hidden states, index t+1 = after step t
        cs = np.zeros((nl, w + 1, maxh))    # cell states
        gates = np.zeros((nl, w, 4 * maxh))
        for t in range(w):
            for i in range(n_ch):
                xs[0, t, i] = windows[n, i, t]
        for l in range(nl):
            d = lin[l]
            hd = lhid[l]
            wx = theta[offs[3 * l]: offs[3 * l] + d * 4 * hd].reshape(d, 4 * hd)
            wh = theta[offs[3 * l + 1]: offs[3 * l + 1] + hd * 4 * hd].reshape(hd, 4 * hd)
            bias = theta[offs[3 * l + 2]: offs[3 * l + 2] + 4 * hd]
            if l == nenc:  # decoder entry: tile the latent over time
                for t in range(w):
                    xs[l, t, :lat_dim] = hs[nenc - 1, w, :lat_dim]
            for t in range(w):
                a = bias + np.dot(xs[l, t, :d], wx) + np.dot(hs[l, t, :hd], wh)
                f = 1.0 / (1.0 + np.exp(-a[:hd]))
                ig = 1.0 / (1.0 + np.exp(-a[hd:2 * hd]))
                g = np.tanh(a[2 * hd:3 * hd])
                og = 1.0 / (1.0 + np.exp(-a[3 * hd:4 * hd]))
                c = f * cs[l, t, :hd] + ig * g
                h = og * np.tanh(c)
                gates[l, t, :hd] = f
                gates[l, t, hd:2 * hd] = ig
                gates[l, t, 2 * hd:3 * hd] = g
                gates[l, t, 3 * hd:4 * hd] = og
                cs[l, t + 1, :hd] = c
                hs[l, t + 1, :hd] = h
                if l + 1 < nl and l + 1 != nenc:
                    xs[l + 1, t, :hd] = h

        # ---- projection + loss ----
        dh_out = np.zeros((nl, w, maxh))    # non-recurrent dL/dh per layer/time
        for t in range(w):
            htop = hs[nl - 1, t + 1, :dp]
            y = bp + np.dot(htop, wp)
            dy = np.empty(n_score)
            for i in range(n_score):
                e = y[i] - windows[n, i, t]
                total_loss += e * e / denom
                dy[i] = 2.0 * e / denom
            gbp += dy
            gwp += htop.reshape(dp, 1) * dy.reshape(1, n_score)
            dh_out[nl - 1, t, :dp] += np.dot(wp, dy)

        # ---- backward through time, top layer first ----
        dlat = np.zeros(lat_dim)
        for l in range(nl - 1, -1, -1):
            d = lin[l]
            hd = lhid[l]
            wx = theta[offs[3 * l]: offs[3 * l] + d * 4 * hd].reshape(d, 4 * hd)
            wh = theta[offs[3 * l + 1]: offs[3 * l + 1] + hd * 4 * hd].reshape(hd, 4 * hd)
            gwx = grad[offs[3 * l]: offs[3 * l] + d * 4 * hd].reshape(d, 4 * hd)
            gwh = grad[offs[3 * l + 1]: offs[3 * l + 1] + hd * 4 * hd].reshape(hd, 4 * hd)
            gb = grad[offs[3 * l + 2]: offs[3 * l + 2] + 4 * hd]
            dh_rec = np.zeros(hd)
            dc = np.zeros(hd)
            for t in range(w - 1, -1, -1):
                dh = dh_out[l, t, :hd] + dh_rec
                f = gates[l, t, :hd]
                ig = gates[l, t, hd:2 * hd]
                g = gates[l, t, 2 * hd:3 * hd]
                og = gates[l, t, 3 * hd:4 * hd]
                tc = np.tanh(cs[l, t + 1, :hd])
                dcc = dc + dh * og * (1.0 - tc * tc)
                da = np.empty(4 * hd)
                da[:hd] = (dcc * cs[l, t, :hd]) * f * (1.0 - f)
                da[hd:2 * hd] = (dcc * g) * ig * (1.0 - ig)
                da[2 * hd:3 * hd] = (dcc * ig) * (1.0 - g * g)
                da[3 * hd:4 * hd] = (dh * tc) * og * (1.0 - og)
                dc = dcc * f
                xin = xs[l, t, :d]
                gwx += xin.reshape(d, 1) * da.reshape(1, 4 * hd)
                gwh += hs[l, t, :hd].reshape(hd, 1) * da.reshape(1, 4 * hd)
                gb += da
                dh_rec = np.dot(wh, da)
                dxin = np.dot(wx, da)
                if l == nenc:
                    dlat += dxin[:lat_dim]
                elif l > 0:
                    dh_out[l - 1, t, :d] += dxin
            if l == nenc:  # latent feeds top encoder layer at its last step
                dh_out[nenc - 1, w - 1, :lat_dim] += dlat

    inv_n = 1.0 / n_batch
    total_loss *= inv_n
    for i in range(grad.shape[0]):
        grad[i] *= inv_n
    return total_loss, grad
