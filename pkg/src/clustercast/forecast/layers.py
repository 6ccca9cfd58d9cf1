"""Neural layers with exact analytic backpropagation, batch-first numpy.

Every layer owns its parameter tensors and matching gradient buffers.
``forward`` caches whatever ``backward`` needs; ``backward`` accumulates
into the gradient buffers and returns the gradient with respect to its
input, so layers compose by chaining calls in reverse order.
"""

from __future__ import annotations

import numpy as np

ACTIVATIONS = ("linear", "relu", "tanh")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _init(rng: np.random.Generator, fan_in: int, shape) -> np.ndarray:
    """Seeded uniform weights in +-1/sqrt(fan_in)."""
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class Dense:
    """Affine map with an optional elementwise nonlinearity: act(x @ W + b)."""

    def __init__(self, n_in: int, n_out: int, activation: str = "linear", rng=None):
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}; choose from {ACTIVATIONS}")
        rng = rng if rng is not None else np.random.default_rng(0)
        self.n_in, self.n_out, self.activation = n_in, n_out, activation
        self.params = [_init(rng, n_in, (n_in, n_out)), np.zeros(n_out)]
        self.grads = [np.zeros_like(p) for p in self.params]
        self._x = None
        self._z = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        z = x @ self.params[0] + self.params[1]
        self._z = z
        if self.activation == "relu":
            return np.maximum(z, 0.0)
        if self.activation == "tanh":
            return np.tanh(z)
        return z

    def backward(self, dout: np.ndarray) -> np.ndarray:
        if self.activation == "relu":
            dz = dout * (self._z > 0.0)
        elif self.activation == "tanh":
            t = np.tanh(self._z)
            dz = dout * (1.0 - t * t)
        else:
            dz = dout
        self.grads[0] += self._x.T @ dz
        self.grads[1] += dz.sum(axis=0)
        return dz @ self.params[0].T


class LSTM:
    """Single recurrent layer with input, forget, candidate, and output gates.

    Parameter layout: input weights W (n_in, 4H), recurrent weights U
    (H, 4H), bias b (4H), gate blocks ordered [input, forget, candidate,
    output]. States start at zero. Returns the final hidden state (n, H),
    or the full state sequence (n, w, H) when ``return_sequences`` is set.
    """

    def __init__(self, n_in: int, hidden: int, rng=None, return_sequences: bool = False):
        rng = rng if rng is not None else np.random.default_rng(0)
        self.n_in, self.hidden = n_in, hidden
        self.return_sequences = return_sequences
        self.params = [
            _init(rng, n_in, (n_in, 4 * hidden)),
            _init(rng, hidden, (hidden, 4 * hidden)),
            np.zeros(4 * hidden),
        ]
        self.grads = [np.zeros_like(p) for p in self.params]
        self._cache = None
        self._x_shape = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        n, w, _ = x.shape
        hh = self.hidden
        w_in, u_rec, bias = self.params
        h = np.zeros((n, hh))
        c = np.zeros((n, hh))
        self._cache = []
        self._x_shape = x.shape
        seq = np.empty((n, w, hh)) if self.return_sequences else None
        for t in range(w):
            z = x[:, t] @ w_in + h @ u_rec + bias
            gi = _sigmoid(z[:, :hh])
            gf = _sigmoid(z[:, hh : 2 * hh])
            gc = np.tanh(z[:, 2 * hh : 3 * hh])
            go = _sigmoid(z[:, 3 * hh :])
            c_new = gf * c + gi * gc
            tc = np.tanh(c_new)
            self._cache.append((x[:, t], h, c, gi, gf, gc, go, tc))
            h = go * tc
            c = c_new
            if seq is not None:
                seq[:, t] = h
        return seq if seq is not None else h

    def backward(self, dout: np.ndarray) -> np.ndarray:
        n, w, _ = self._x_shape
        hh = self.hidden
        w_in, u_rec, _ = self.params
        dx = np.zeros(self._x_shape)
        dh = np.zeros((n, hh)) if self.return_sequences else np.array(dout, copy=True)
        dc = np.zeros((n, hh))
        for t in reversed(range(w)):
            if self.return_sequences:
                dh = dh + dout[:, t]
            x_t, h_prev, c_prev, gi, gf, gc, go, tc = self._cache[t]
            dgo = dh * tc
            dc = dc + dh * go * (1.0 - tc * tc)
            dgi = dc * gc
            dgf = dc * c_prev
            dgc = dc * gi
            dz = np.concatenate(
                [
                    dgi * gi * (1.0 - gi),
                    dgf * gf * (1.0 - gf),
                    dgc * (1.0 - gc * gc),
                    dgo * go * (1.0 - go),
                ],
                axis=1,
            )
            self.grads[0] += x_t.T @ dz
            self.grads[1] += h_prev.T @ dz
            self.grads[2] += dz.sum(axis=0)
            dx[:, t] = dz @ w_in.T
            dh = dz @ u_rec.T
            dc = dc * gf
        return dx


class BiLSTM:
    """Two independent recurrent passes, one over the reversed sequence.

    Output concatenates the two final hidden states, so its width is 2H.
    """

    def __init__(self, n_in: int, hidden: int, rng=None):
        rng = rng if rng is not None else np.random.default_rng(0)
        self.hidden = hidden
        self.fwd = LSTM(n_in, hidden, rng)
        self.bwd = LSTM(n_in, hidden, rng)
        self.params = self.fwd.params + self.bwd.params
        self.grads = self.fwd.grads + self.bwd.grads

    def forward(self, x: np.ndarray) -> np.ndarray:
        hf = self.fwd.forward(x)
        hb = self.bwd.forward(x[:, ::-1])
        return np.concatenate([hf, hb], axis=1)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        hh = self.hidden
        dxf = self.fwd.backward(dout[:, :hh])
        dxb = self.bwd.backward(dout[:, hh:])
        return dxf + dxb[:, ::-1]
