"""Training loop, gradient verification, horizon models, and cross-validation.

Training standardizes dynamic inputs per column, statics per feature, and
the target, then runs seeded mini-batch Adam on mean-squared error. A
TrainedModel keeps the three standardizers so predictions leave in original
units. Horizon models forecast the target column's value at a fixed index
from the last window of the training prefix (one direct model per horizon).
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..core import Dataset, SeriesRecord, Standardizer, SupervisedSet, fit_standardizer
from ..errors import (
    Divergence,
    HorizonMismatch,
    OutOfRange,
    SchemaError,
    ShapeMismatch,
    StaticBranchMismatch,
    TooShort,
)
from ..metrics import ErrorTriple
from .layers import Dense
from .models import ARCHITECTURE_NOTE, BaseModel, ModelSpec, build_model

MODEL_FORMAT = "clustercast-model"
MODEL_FORMAT_VERSION = 1


class Adam:
    """Adaptive-moment gradient steps over a fixed parameter list, in place."""

    def __init__(self, params, learning_rate=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.learning_rate = learning_rate
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        scale = self.learning_rate * np.sqrt(1.0 - b2**self.t) / (1.0 - b1**self.t)
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= scale * m / (np.sqrt(v) + self.eps)


def loss_and_grads(model: BaseModel, dynamic, targets, static=None, reduction="mean") -> float:
    """Squared-error loss of one batch; gradients land in ``model.grads``."""
    if reduction not in ("mean", "sum"):
        raise ValueError("reduction must be 'mean' or 'sum'")
    model.zero_grads()
    pred = model.forward_batch(dynamic, static)
    err = pred - targets
    if reduction == "mean":
        loss = float((err * err).mean())
        model.backward_batch(2.0 * err / len(err))
    else:
        loss = float((err * err).sum())
        model.backward_batch(2.0 * err)
    return loss


def _loss_only(model: BaseModel, dynamic, targets, static, reduction) -> float:
    err = model.forward_batch(dynamic, static) - targets
    return float((err * err).mean() if reduction == "mean" else (err * err).sum())


def fit(
    model: BaseModel,
    dynamic: np.ndarray,
    targets: np.ndarray,
    static: np.ndarray | None = None,
    epochs: int = 200,
    batch_size: int = 32,
    learning_rate: float = 1e-3,
    rng: np.random.Generator | None = None,
) -> list[float]:
    """Mini-batch Adam on mean-squared error; returns per-epoch mean loss.

    Batches are drawn from a fresh seeded shuffle each epoch. A non-finite
    loss aborts with Divergence rather than continuing on garbage.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    optimizer = Adam(model.params, learning_rate)
    n = len(targets)
    history: list[float] = []
    for epoch in range(epochs):
        order = rng.permutation(n)
        total = 0.0
        for lo in range(0, n, batch_size):
            idx = order[lo : lo + batch_size]
            batch_static = static[idx] if static is not None else None
            loss = loss_and_grads(model, dynamic[idx], targets[idx], batch_static)
            if not np.isfinite(loss):
                raise Divergence(
                    f"non-finite loss {loss} at epoch {epoch}, batch offset {lo}; "
                    "lower the learning rate or standardize inputs"
                )
            optimizer.step(model.grads)
            total += loss * len(idx)
        history.append(total / n)
    return history


@dataclass(frozen=True)
class TrainedModel:
    """Weights plus the standardizers that define the model's unit contract."""

    spec: ModelSpec
    model: BaseModel
    history: tuple[float, ...]
    dynamic_standardizer: Standardizer
    static_standardizer: Standardizer | None
    target_standardizer: Standardizer

    def predict(self, dynamic, static=None) -> np.ndarray:
        """Forecasts in original units for a (n, w, D) batch."""
        dyn = np.asarray(dynamic, dtype=float)
        n, w, d = dyn.shape
        dyn_s = self.dynamic_standardizer.apply(dyn.reshape(-1, d)).reshape(n, w, d)
        if self.model.uses_static:
            if static is None:
                raise StaticBranchMismatch(
                    f"{self.spec.architecture} requires static features"
                )
            static_s = self.static_standardizer.apply(np.asarray(static, dtype=float))
        else:
            if static is not None:
                raise StaticBranchMismatch(
                    f"{self.spec.architecture} takes no static features"
                )
            static_s = None
        raw = self.model.forward_batch(dyn_s, static_s)
        return self.target_standardizer.invert(raw[:, None])[:, 0]


def train(spec: ModelSpec, supervised: SupervisedSet, seed: int | None = None) -> TrainedModel:
    """Standardize, build seeded weights, and fit for the configured epoch budget.

    With epochs=0 the returned model is its initialization and the history
    is empty. The same seed always yields identical weight tensors.
    """
    seed = spec.seed if seed is None else seed
    if supervised.window_length != spec.window:
        raise ShapeMismatch(
            f"supervised window {supervised.window_length} != spec window {spec.window}"
        )
    dyn = supervised.dynamic()
    static = supervised.static()
    if spec.uses_static and static is None:
        raise StaticBranchMismatch(
            f"{spec.architecture} requires static features in the supervised set"
        )
    if not spec.uses_static and static is not None:
        raise StaticBranchMismatch(
            f"{spec.architecture} takes no static features; build the supervised "
            "set without them"
        )
    if not np.all(np.isfinite(supervised.inputs)) or not np.all(
        np.isfinite(supervised.targets)
    ):
        raise ValueError("supervised set contains non-finite values; impute first")
    n, w, d = dyn.shape
    dynamic_std = fit_standardizer(dyn.reshape(-1, d))
    dyn_s = dynamic_std.apply(dyn.reshape(-1, d)).reshape(n, w, d)
    if static is not None:
        static_std = fit_standardizer(static)
        static_s = static_std.apply(static)
    else:
        static_std, static_s = None, None
    target_std = fit_standardizer(supervised.targets)
    targets_s = target_std.apply(supervised.targets[:, None])[:, 0]
    rng = np.random.default_rng(seed)
    model = build_model(spec, d, supervised.static_dim, rng)
    history = fit(
        model,
        dyn_s,
        targets_s,
        static_s,
        epochs=spec.epochs,
        batch_size=spec.batch_size,
        learning_rate=spec.learning_rate,
        rng=rng,
    )
    return TrainedModel(
        spec=spec,
        model=model,
        history=tuple(history),
        dynamic_standardizer=dynamic_std,
        static_standardizer=static_std,
        target_standardizer=target_std,
    )


@dataclass(frozen=True)
class GradientCheckResult:
    """Comparison of analytic and central-finite-difference gradients."""

    passed: bool
    max_rel_error: float
    max_abs_diff: float
    n_components: int
    kink_risk: bool


def _relu_kink_risk(model: BaseModel, margin: float = 1e-3) -> bool:
    """True when a rectifier sits close enough to 0 to corrupt differences."""
    for layer in model.layers:
        if isinstance(layer, Dense) and layer.activation == "relu":
            if layer._z is not None and np.abs(layer._z).min() < margin:
                return True
    return False


def gradient_check(
    model: BaseModel,
    dynamic,
    targets,
    static=None,
    eps: float = 1e-5,
    reduction: str = "mean",
    rel_tol: float = 1e-4,
    abs_floor: float = 1e-8,
) -> GradientCheckResult:
    """Compare every analytic gradient component against central differences.

    A component passes when the absolute difference is under ``abs_floor``
    (both gradients effectively zero) or the relative error, measured
    against the larger magnitude, is under ``rel_tol``. ``kink_risk`` flags
    a rectifier pre-activation within 1e-3 of zero, where finite
    differences themselves are unreliable; callers should redraw the seed.
    """
    loss_and_grads(model, dynamic, targets, static, reduction)
    analytic = [g.copy() for g in model.grads]
    kink = _relu_kink_risk(model)
    max_rel = 0.0
    max_abs = 0.0
    n_components = 0
    passed = True
    for p, ga in zip(model.params, analytic):
        flat = p.reshape(-1)
        ga_flat = ga.reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + eps
            up = _loss_only(model, dynamic, targets, static, reduction)
            flat[j] = orig - eps
            down = _loss_only(model, dynamic, targets, static, reduction)
            flat[j] = orig
            gn = (up - down) / (2.0 * eps)
            diff = abs(ga_flat[j] - gn)
            max_abs = max(max_abs, diff)
            n_components += 1
            if diff <= abs_floor:
                continue
            rel = diff / max(abs(ga_flat[j]), abs(gn))
            max_rel = max(max_rel, rel)
            if rel >= rel_tol:
                passed = False
    return GradientCheckResult(
        passed=passed,
        max_rel_error=max_rel,
        max_abs_diff=max_abs,
        n_components=n_components,
        kink_risk=kink,
    )


def _default_target(columns: tuple[str, ...]) -> str:
    return columns[2] if len(columns) >= 3 else columns[-1]


@dataclass(frozen=True)
class HorizonModel:
    """A trained direct forecaster bound to one (n_train, K) pair."""

    trained: TrainedModel
    n_train: int
    horizon_index: int
    columns: tuple[str, ...]
    target_column: str

    @property
    def spec(self) -> ModelSpec:
        return self.trained.spec


def _horizon_supervised(
    dataset: Dataset,
    spec: ModelSpec,
    n_train: int,
    horizon_index: int,
    columns: tuple[str, ...],
    target_column: str,
) -> SupervisedSet:
    w = spec.window
    rows = []
    targets = []
    for rec in dataset.records:
        window = rec.stacked(columns)[n_train - w : n_train]
        parts = [window.reshape(-1)]
        if spec.uses_static:
            parts.append(rec.static_features)
        rows.append(np.concatenate(parts))
        targets.append(rec.measurements[target_column][horizon_index - 1])
    return SupervisedSet(
        inputs=np.vstack(rows),
        targets=np.array(targets),
        window_length=w,
        horizon=horizon_index - n_train,
        n_series_columns=len(columns),
        static_dim=dataset.schema.static_dim if spec.uses_static else 0,
    )


def _validate_horizon(schema_length: int, n_train: int, horizon_index: int, window: int):
    if not 0 < n_train <= schema_length:
        raise OutOfRange(f"n_train must be in 1..{schema_length}, got {n_train}")
    if horizon_index <= n_train:
        raise HorizonMismatch(
            f"horizon index {horizon_index} must exceed n_train {n_train}"
        )
    if horizon_index > schema_length:
        raise OutOfRange(
            f"horizon index {horizon_index} exceeds series length {schema_length}"
        )
    if window > n_train:
        raise TooShort(
            f"window {window} does not fit in a training prefix of {n_train}"
        )


def train_horizon_model(
    spec: ModelSpec,
    dataset: Dataset,
    n_train: int,
    horizon_index: int,
    columns=None,
    target_column: str | None = None,
    seed: int | None = None,
) -> HorizonModel:
    """One direct model: last ``window`` training values -> value at index K.

    Each record contributes a single example: the final window of its
    length-``n_train`` prefix over the selected columns (plus statics for
    architectures with a static branch), paired with the target column's
    value at one-based index K.
    """
    schema = dataset.schema
    cols = tuple(columns) if columns is not None else schema.columns
    for c in cols:
        if c not in schema.columns:
            raise SchemaError(f"unknown column {c!r}")
    target = target_column if target_column is not None else _default_target(schema.columns)
    if target not in schema.columns:
        raise SchemaError(f"unknown target column {target!r}")
    _validate_horizon(schema.length, n_train, horizon_index, spec.window)
    supervised = _horizon_supervised(dataset, spec, n_train, horizon_index, cols, target)
    trained = train(spec, supervised, seed)
    return HorizonModel(
        trained=trained,
        n_train=n_train,
        horizon_index=horizon_index,
        columns=cols,
        target_column=target,
    )


def predict_horizon(model: HorizonModel, record: SeriesRecord, n_train: int, horizon_index: int) -> float:
    """Forecast the target column's value at one-based index K, original units."""
    if horizon_index <= n_train:
        raise HorizonMismatch(
            f"horizon index {horizon_index} must exceed n_train {n_train}"
        )
    if (n_train, horizon_index) != (model.n_train, model.horizon_index):
        raise HorizonMismatch(
            f"model was trained for (n_train={model.n_train}, K={model.horizon_index}), "
            f"got (n_train={n_train}, K={horizon_index})"
        )
    if horizon_index > record.length:
        raise OutOfRange(
            f"horizon index {horizon_index} exceeds record length {record.length}"
        )
    w = model.spec.window
    window = record.stacked(model.columns)[n_train - w : n_train]
    static = record.static_features[None] if model.spec.uses_static else None
    return float(model.trained.predict(window[None], static)[0])


@dataclass(frozen=True)
class CVResult:
    """Per-fold and mean error triples from record-level cross-validation."""

    folds: tuple[ErrorTriple, ...]
    mean: ErrorTriple
    seconds: float
    fold_record_ids: tuple[tuple[str, ...], ...]


def cross_validate(
    spec: ModelSpec,
    dataset: Dataset,
    n_train: int,
    horizon_index: int,
    n_folds: int = 5,
    seed: int = 0,
    columns=None,
    target_column: str | None = None,
) -> CVResult:
    """Record-level k-fold errors of direct horizon forecasts.

    Records are shuffled with the seed and split into near-equal folds;
    each fold is scored by a model trained on the others, with per-fold
    training seeds derived from the same root seed.
    """
    n = len(dataset.records)
    if n < n_folds:
        raise ValueError(f"need at least {n_folds} records, got {n}")
    start = time.perf_counter()
    order = np.random.default_rng(seed).permutation(n)
    folds = np.array_split(order, n_folds)
    fold_seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n_folds)]
    target = target_column if target_column is not None else _default_target(dataset.schema.columns)
    per_fold = []
    fold_ids = []
    for held_out, fold_seed in zip(folds, fold_seeds):
        mask = np.ones(n, dtype=bool)
        mask[held_out] = False
        model = train_horizon_model(
            spec,
            dataset.subset(np.flatnonzero(mask)),
            n_train,
            horizon_index,
            columns=columns,
            target_column=target,
            seed=fold_seed,
        )
        test_records = [dataset.records[i] for i in held_out]
        actual = [r.measurements[target][horizon_index - 1] for r in test_records]
        predicted = [predict_horizon(model, r, n_train, horizon_index) for r in test_records]
        per_fold.append(ErrorTriple.of(actual, predicted))
        fold_ids.append(tuple(r.id for r in test_records))
    mean = ErrorTriple(
        mae=float(np.mean([f.mae for f in per_fold])),
        rmse=float(np.mean([f.rmse for f in per_fold])),
        mape=float(np.mean([f.mape for f in per_fold])),
    )
    return CVResult(
        folds=tuple(per_fold),
        mean=mean,
        seconds=time.perf_counter() - start,
        fold_record_ids=tuple(fold_ids),
    )


def _standardizer_doc(s: Standardizer | None):
    if s is None:
        return None
    return {"mean": s.mean.tolist(), "std": s.std.tolist()}


def _standardizer_from(doc) -> Standardizer | None:
    if doc is None:
        return None
    return Standardizer(mean=np.array(doc["mean"]), std=np.array(doc["std"]))


def save_model(trained: TrainedModel, path) -> None:
    """Write a self-describing, versioned JSON snapshot of the model."""
    doc = {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "architecture_note": ARCHITECTURE_NOTE,
        "spec": asdict(trained.spec),
        "dims": {
            "n_dynamic": trained.model.n_dynamic,
            "static_dim": trained.model.static_dim,
        },
        "history": list(trained.history),
        "weights": [w.tolist() for w in trained.model.params],
        "standardizers": {
            "dynamic": _standardizer_doc(trained.dynamic_standardizer),
            "static": _standardizer_doc(trained.static_standardizer),
            "target": _standardizer_doc(trained.target_standardizer),
        },
    }
    Path(path).write_text(json.dumps(doc))


def load_model(path) -> TrainedModel:
    """Rebuild a TrainedModel saved by ``save_model``, bit-exact weights."""
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != MODEL_FORMAT:
        raise SchemaError(f"not a model file: format {doc.get('format')!r}")
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise SchemaError(
            f"unsupported model format version {doc.get('format_version')!r}"
        )
    spec = ModelSpec(**doc["spec"])
    dims = doc["dims"]
    model = build_model(
        spec, dims["n_dynamic"], dims["static_dim"], np.random.default_rng(0)
    )
    saved = [np.array(w) for w in doc["weights"]]
    params = model.params
    if len(saved) != len(params):
        raise SchemaError("weight tensor count does not match the architecture")
    for p, w in zip(params, saved):
        if p.shape != w.shape:
            raise SchemaError(f"weight shape {w.shape} does not match {p.shape}")
        p[...] = w
    std = doc["standardizers"]
    return TrainedModel(
        spec=spec,
        model=model,
        history=tuple(doc["history"]),
        dynamic_standardizer=_standardizer_from(std["dynamic"]),
        static_standardizer=_standardizer_from(std["static"]),
        target_standardizer=_standardizer_from(std["target"]),
    )
