"""From-scratch neural forecasters: layers, architectures, training, CV."""

from .layers import BiLSTM, Dense, LSTM
from .models import (
    ARCHITECTURE_NOTE,
    ARCHITECTURES,
    DESCRIPTIONS,
    STATIC_ARCHITECTURES,
    BaseModel,
    DenseStack,
    ModelSpec,
    build_model,
    forward,
)
from .training import (
    Adam,
    CVResult,
    GradientCheckResult,
    HorizonModel,
    TrainedModel,
    cross_validate,
    fit,
    gradient_check,
    load_model,
    loss_and_grads,
    predict_horizon,
    save_model,
    train,
    train_horizon_model,
)

__all__ = [
    "ARCHITECTURE_NOTE",
    "ARCHITECTURES",
    "DESCRIPTIONS",
    "STATIC_ARCHITECTURES",
    "Adam",
    "BaseModel",
    "BiLSTM",
    "CVResult",
    "Dense",
    "DenseStack",
    "GradientCheckResult",
    "HorizonModel",
    "LSTM",
    "ModelSpec",
    "TrainedModel",
    "build_model",
    "cross_validate",
    "fit",
    "forward",
    "gradient_check",
    "load_model",
    "loss_and_grads",
    "predict_horizon",
    "save_model",
    "train",
    "train_horizon_model",
]
