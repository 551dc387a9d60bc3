"""LSTM and GRU cells with hand-derived backward passes.

Every cell works on a batch: ``x`` is (B, in), states are (B, H).  A mask
``m`` of shape (B, 1) freezes the state of finished/padded rows: the new
state is ``m * cell(x, h) + (1 - m) * h``.

Parameters live in a flat dict under ``prefix + "W"``, ``"U"``, ``"b"``.
"""
from __future__ import annotations

import numpy as np


def sigmoid(x):
    return 0.5 * (np.tanh(0.5 * x) + 1.0)


class LSTMCell:
    kind = "lstm"
    gates = 4

    @staticmethod
    def init_params(rng, prefix, n_in, n_hidden, scale, dtype):
        H = n_hidden
        p = {
            prefix + "W": rng.uniform(-scale, scale, (n_in, 4 * H)).astype(dtype),
            prefix + "U": rng.uniform(-scale, scale, (H, 4 * H)).astype(dtype),
            prefix + "b": np.zeros(4 * H, dtype=dtype),
        }
        p[prefix + "b"][H:2 * H] = 1.0  # forget gate bias
        return p

    @staticmethod
    def zero_state(batch, H, dtype):
        return (np.zeros((batch, H), dtype=dtype), np.zeros((batch, H), dtype=dtype))

    @staticmethod
    def forward(params, prefix, x, state, m=None):
        h, c = state
        W, U, b = params[prefix + "W"], params[prefix + "U"], params[prefix + "b"]
        H = h.shape[1]
        z = x @ W + h @ U + b
        i = sigmoid(z[:, :H])
        f = sigmoid(z[:, H:2 * H])
        o = sigmoid(z[:, 2 * H:3 * H])
        g = np.tanh(z[:, 3 * H:])
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        h_new = o * tc
        if m is not None:
            h_new = m * h_new + (1 - m) * h
            c_new = m * c_new + (1 - m) * c
        cache = (x, h, c, i, f, o, g, tc, m)
        return (h_new, c_new), cache

    @staticmethod
    def backward(params, prefix, grads, dstate, cache):
        dh_new, dc_new = dstate
        x, h, c, i, f, o, g, tc, m = cache
        W, U = params[prefix + "W"], params[prefix + "U"]
        if m is not None:
            dh_skip, dc_skip = (1 - m) * dh_new, (1 - m) * dc_new
            dh_new, dc_new = m * dh_new, m * dc_new
        do = dh_new * tc
        dc = dc_new + dh_new * o * (1 - tc * tc)
        di = dc * g
        dg = dc * i
        df = dc * c
        dc_prev = dc * f
        dz = np.concatenate(
            [di * i * (1 - i), df * f * (1 - f), do * o * (1 - o), dg * (1 - g * g)], axis=1)
        grads[prefix + "W"] += x.T @ dz
        grads[prefix + "U"] += h.T @ dz
        grads[prefix + "b"] += dz.sum(axis=0)
        dx = dz @ W.T
        dh_prev = dz @ U.T
        if m is not None:
            dh_prev += dh_skip
            dc_prev += dc_skip
        return dx, (dh_prev, dc_prev)


class GRUCell:
    kind = "gru"
    gates = 3

    @staticmethod
    def init_params(rng, prefix, n_in, n_hidden, scale, dtype):
        H = n_hidden
        return {
            prefix + "W": rng.uniform(-scale, scale, (n_in, 3 * H)).astype(dtype),
            prefix + "U": rng.uniform(-scale, scale, (H, 3 * H)).astype(dtype),
            prefix + "b": np.zeros(3 * H, dtype=dtype),
        }

    @staticmethod
    def zero_state(batch, H, dtype):
        return (np.zeros((batch, H), dtype=dtype),)

    @staticmethod
    def forward(params, prefix, x, state, m=None):
        (h,) = state
        W, U, b = params[prefix + "W"], params[prefix + "U"], params[prefix + "b"]
        H = h.shape[1]
        xw = x @ W + b
        hu = h @ U
        zr = sigmoid(xw[:, :2 * H] + hu[:, :2 * H])
        z, r = zr[:, :H], zr[:, H:]
        hu_n = hu[:, 2 * H:]
        n = np.tanh(xw[:, 2 * H:] + r * hu_n)
        h_new = (1 - z) * n + z * h
        if m is not None:
            h_new = m * h_new + (1 - m) * h
        return (h_new,), (x, h, z, r, n, hu_n, m)

    @staticmethod
    def backward(params, prefix, grads, dstate, cache):
        (dh_new,) = dstate
        x, h, z, r, n, hu_n, m = cache
        W, U = params[prefix + "W"], params[prefix + "U"]
        if m is not None:
            dh_skip = (1 - m) * dh_new
            dh_new = m * dh_new
        dn = dh_new * (1 - z)
        dz = dh_new * (h - n)
        dh_prev = dh_new * z
        dn_pre = dn * (1 - n * n)
        dr = dn_pre * hu_n
        dz_pre = dz * z * (1 - z)
        dr_pre = dr * r * (1 - r)
        dxw = np.concatenate([dz_pre, dr_pre, dn_pre], axis=1)
        dhu = np.concatenate([dz_pre, dr_pre, dn_pre * r], axis=1)
        grads[prefix + "W"] += x.T @ dxw
        grads[prefix + "b"] += dxw.sum(axis=0)
        grads[prefix + "U"] += h.T @ dhu
        dx = dxw @ W.T
        dh_prev = dh_prev + dhu @ U.T
        if m is not None:
            dh_prev += dh_skip
        return dx, (dh_prev,)


CELLS = {"lstm": LSTMCell, "gru": GRUCell}


def get_cell(kind):
    try:
        return CELLS[kind.lower()]
    except KeyError:
        raise ValueError(f"unknown cell kind {kind!r}; expected one of {sorted(CELLS)}") from None
