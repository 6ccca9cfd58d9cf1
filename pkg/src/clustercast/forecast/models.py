"""The seven forecasting architectures and their batch forward/backward wiring.

M1-M3 consume only the dynamic window; M4-M7 additionally require a static
feature vector and differ in where it enters: a fused dense branch (M4),
replication into every timestep (M5), concatenation at the output head (M6),
or a recurrence-free dense network over the flattened window (M7). Exact
layer sizes are this artifact's canonical reading of the architecture
family, labeled in all outputs (see ARCHITECTURE_NOTE).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeMismatch, StaticBranchMismatch
from .layers import BiLSTM, Dense, LSTM

ARCHITECTURES = ("M1", "M2", "M3", "M4", "M5", "M6", "M7")
STATIC_ARCHITECTURES = ("M4", "M5", "M6", "M7")

ARCHITECTURE_NOTE = "architecture interpretation v1"

DESCRIPTIONS = {
    "M1": "single recurrent layer, dense head",
    "M2": "two stacked recurrent layers, dense head",
    "M3": "bidirectional recurrent layer, dense head",
    "M4": "recurrent branch + dense static branch, fused by two dense layers",
    "M5": "static vector replicated into every timestep of one recurrent layer",
    "M6": "recurrent final state concatenated with raw statics at the head",
    "M7": "dense-only network on the flattened window and statics",
}


@dataclass(frozen=True)
class ModelSpec:
    """Architecture name plus training hyperparameters."""

    architecture: str
    hidden: int = 32
    window: int = 24
    learning_rate: float = 1e-3
    epochs: int = 200
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ValueError(
                f"unknown architecture {self.architecture!r}; choose from {ARCHITECTURES}"
            )
        if self.hidden < 1 or self.window < 1 or self.batch_size < 1:
            raise ValueError("hidden, window, and batch_size must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")

    @property
    def uses_static(self) -> bool:
        return self.architecture in STATIC_ARCHITECTURES


class BaseModel:
    """Common parameter plumbing; subclasses wire forward/backward."""

    architecture = ""
    uses_static = False

    def __init__(self, n_dynamic: int, static_dim: int, hidden: int, window: int):
        self.n_dynamic = n_dynamic
        self.static_dim = static_dim
        self.hidden = hidden
        self.window = window
        self.layers: list = []

    @property
    def params(self) -> list[np.ndarray]:
        return [p for layer in self.layers for p in layer.params]

    @property
    def grads(self) -> list[np.ndarray]:
        return [g for layer in self.layers for g in layer.grads]

    def zero_grads(self) -> None:
        for g in self.grads:
            g[...] = 0.0

    def forward_batch(self, dynamic: np.ndarray, static=None) -> np.ndarray:
        raise NotImplementedError

    def backward_batch(self, dpred: np.ndarray) -> None:
        raise NotImplementedError


class M1(BaseModel):
    architecture = "M1"

    def __init__(self, n_dynamic, static_dim, hidden, window, rng):
        super().__init__(n_dynamic, 0, hidden, window)
        self.lstm = LSTM(n_dynamic, hidden, rng)
        self.head = Dense(hidden, 1, "linear", rng)
        self.layers = [self.lstm, self.head]

    def forward_batch(self, dynamic, static=None):
        return self.head.forward(self.lstm.forward(dynamic))[:, 0]

    def backward_batch(self, dpred):
        self.lstm.backward(self.head.backward(dpred[:, None]))


class M2(BaseModel):
    architecture = "M2"

    def __init__(self, n_dynamic, static_dim, hidden, window, rng):
        super().__init__(n_dynamic, 0, hidden, window)
        self.lower = LSTM(n_dynamic, hidden, rng, return_sequences=True)
        self.upper = LSTM(hidden, hidden, rng)
        self.head = Dense(hidden, 1, "linear", rng)
        self.layers = [self.lower, self.upper, self.head]

    def forward_batch(self, dynamic, static=None):
        return self.head.forward(self.upper.forward(self.lower.forward(dynamic)))[:, 0]

    def backward_batch(self, dpred):
        self.lower.backward(self.upper.backward(self.head.backward(dpred[:, None])))


class M3(BaseModel):
    architecture = "M3"

    def __init__(self, n_dynamic, static_dim, hidden, window, rng):
        super().__init__(n_dynamic, 0, hidden, window)
        self.bilstm = BiLSTM(n_dynamic, hidden, rng)
        self.head = Dense(2 * hidden, 1, "linear", rng)
        self.layers = [self.bilstm, self.head]

    def forward_batch(self, dynamic, static=None):
        return self.head.forward(self.bilstm.forward(dynamic))[:, 0]

    def backward_batch(self, dpred):
        self.bilstm.backward(self.head.backward(dpred[:, None]))


class M4(BaseModel):
    """Deepest fusion: both branches meet in a dense stack before the head."""

    architecture = "M4"
    uses_static = True

    def __init__(self, n_dynamic, static_dim, hidden, window, rng):
        super().__init__(n_dynamic, static_dim, hidden, window)
        self.lstm = LSTM(n_dynamic, hidden, rng)
        self.static_branch = Dense(static_dim, hidden, "relu", rng)
        self.fuse = Dense(2 * hidden, hidden, "relu", rng)
        self.head = Dense(hidden, 1, "linear", rng)
        self.layers = [self.lstm, self.static_branch, self.fuse, self.head]

    def forward_batch(self, dynamic, static=None):
        joined = np.concatenate(
            [self.lstm.forward(dynamic), self.static_branch.forward(static)], axis=1
        )
        return self.head.forward(self.fuse.forward(joined))[:, 0]

    def backward_batch(self, dpred):
        djoined = self.fuse.backward(self.head.backward(dpred[:, None]))
        self.lstm.backward(djoined[:, : self.hidden])
        self.static_branch.backward(djoined[:, self.hidden :])


class M5(BaseModel):
    """Statics enter the recurrence itself, tiled onto each timestep."""

    architecture = "M5"
    uses_static = True

    def __init__(self, n_dynamic, static_dim, hidden, window, rng):
        super().__init__(n_dynamic, static_dim, hidden, window)
        self.lstm = LSTM(n_dynamic + static_dim, hidden, rng)
        self.head = Dense(hidden, 1, "linear", rng)
        self.layers = [self.lstm, self.head]

    def forward_batch(self, dynamic, static=None):
        tiled = np.broadcast_to(
            static[:, None, :], (len(static), dynamic.shape[1], self.static_dim)
        )
        augmented = np.concatenate([dynamic, tiled], axis=2)
        return self.head.forward(self.lstm.forward(augmented))[:, 0]

    def backward_batch(self, dpred):
        self.lstm.backward(self.head.backward(dpred[:, None]))


class M6(BaseModel):
    """Shallowest fusion: raw statics join the final state at the linear head."""

    architecture = "M6"
    uses_static = True

    def __init__(self, n_dynamic, static_dim, hidden, window, rng):
        super().__init__(n_dynamic, static_dim, hidden, window)
        self.lstm = LSTM(n_dynamic, hidden, rng)
        self.head = Dense(hidden + static_dim, 1, "linear", rng)
        self.layers = [self.lstm, self.head]

    def forward_batch(self, dynamic, static=None):
        joined = np.concatenate([self.lstm.forward(dynamic), static], axis=1)
        return self.head.forward(joined)[:, 0]

    def backward_batch(self, dpred):
        djoined = self.head.backward(dpred[:, None])
        self.lstm.backward(djoined[:, : self.hidden])


class M7(BaseModel):
    """No recurrence: one hidden dense layer over [flat window, statics]."""

    architecture = "M7"
    uses_static = True

    def __init__(self, n_dynamic, static_dim, hidden, window, rng):
        super().__init__(n_dynamic, static_dim, hidden, window)
        self.hidden_layer = Dense(window * n_dynamic + static_dim, hidden, "relu", rng)
        self.head = Dense(hidden, 1, "linear", rng)
        self.layers = [self.hidden_layer, self.head]

    def forward_batch(self, dynamic, static=None):
        flat = np.concatenate([dynamic.reshape(len(dynamic), -1), static], axis=1)
        return self.head.forward(self.hidden_layer.forward(flat))[:, 0]

    def backward_batch(self, dpred):
        self.hidden_layer.backward(self.head.backward(dpred[:, None]))


class DenseStack(BaseModel):
    """Feed-forward stack over the flattened window alone, linear output.

    Not one of the seven named architectures; a minimal head for fitting
    directly realizable targets and for exercising the training engine.
    """

    architecture = "dense"

    def __init__(self, n_dynamic, hidden_dims, window, rng, activation="relu"):
        super().__init__(n_dynamic, 0, max(hidden_dims, default=0), window)
        dims = [window * n_dynamic, *hidden_dims, 1]
        self.layers = [
            Dense(a, b, activation if b != 1 else "linear", rng)
            for a, b in zip(dims, dims[1:])
        ]

    def forward_batch(self, dynamic, static=None):
        out = dynamic.reshape(len(dynamic), -1)
        for layer in self.layers:
            out = layer.forward(out)
        return out[:, 0]

    def backward_batch(self, dpred):
        dout = dpred[:, None]
        for layer in reversed(self.layers):
            dout = layer.backward(dout)


_CLASSES = {"M1": M1, "M2": M2, "M3": M3, "M4": M4, "M5": M5, "M6": M6, "M7": M7}


def build_model(spec: ModelSpec, n_dynamic: int, static_dim: int, rng) -> BaseModel:
    """Instantiate an architecture with seeded weights for the given dims."""
    if n_dynamic < 1:
        raise ShapeMismatch("need at least one dynamic input column")
    if spec.uses_static and static_dim < 1:
        raise StaticBranchMismatch(
            f"{spec.architecture} requires static features, got dimension {static_dim}"
        )
    if not spec.uses_static:
        static_dim = 0
    return _CLASSES[spec.architecture](
        n_dynamic, static_dim, spec.hidden, spec.window, rng
    )


def forward(model: BaseModel, dynamic_input, static_input=None) -> float:
    """Score one example: a (window, n_dynamic) block plus optional statics.

    A one-dimensional dynamic input is treated as a single-column window.
    """
    dyn = np.asarray(dynamic_input, dtype=float)
    if dyn.ndim == 1:
        dyn = dyn[:, None]
    if dyn.shape != (model.window, model.n_dynamic):
        raise ShapeMismatch(
            f"dynamic input shape {dyn.shape} does not match "
            f"(window={model.window}, columns={model.n_dynamic})"
        )
    if model.uses_static:
        if static_input is None:
            raise StaticBranchMismatch(
                f"{model.architecture} requires a static input vector"
            )
        stat = np.asarray(static_input, dtype=float)
        if stat.shape != (model.static_dim,):
            raise ShapeMismatch(
                f"static input shape {stat.shape} does not match ({model.static_dim},)"
            )
        return float(model.forward_batch(dyn[None], stat[None])[0])
    if static_input is not None:
        raise StaticBranchMismatch(
            f"{model.architecture} takes no static input"
        )
    return float(model.forward_batch(dyn[None])[0])
