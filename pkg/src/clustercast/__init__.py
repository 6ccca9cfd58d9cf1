"""Clustering-aided neural forecasting for multivariate time series.

The pipeline: generate or load series, detect and repair anomalies, group
records by warping distance or by extracted features, train per-cluster
forecasters, and report cluster-weighted errors.
"""

from ._native import BACKEND
from .errors import ClusterCastError

__version__ = "0.1.0"

__all__ = ["BACKEND", "ClusterCastError", "__version__"]
