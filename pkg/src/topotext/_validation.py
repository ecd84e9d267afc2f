"""Small input-validation helpers used by the estimators and metric functions."""
from __future__ import annotations

import numpy as np


def as_vector(x, name="x") -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    return v


def as_point_array(x, name="points") -> np.ndarray:
    """Coerce to a finite 2-D float array (one point per row)."""
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D (n_points, dim), got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite values")
    return a


def as_feature_matrix(x, name="X") -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D (n_samples, n_features), got shape {a.shape}")
    if a.shape[0] == 0:
        raise ValueError(f"{name} has no rows")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite values")
    return a


def check_same_dim(a: np.ndarray, b: np.ndarray, what="inputs") -> None:
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(
            f"dimension mismatch between {what}: {a.shape[-1]} vs {b.shape[-1]}"
        )


def check_binary_labels(y, name="y") -> np.ndarray:
    arr = np.asarray(y)
    vals = np.unique(arr)
    if not np.isin(vals, [0, 1]).all():
        raise ValueError(f"{name} must contain only 0/1 labels, got {vals}")
    if vals.size < 2:
        raise ValueError(f"{name} contains a single class; need both 0 and 1")
    return arr.astype(np.float64)
