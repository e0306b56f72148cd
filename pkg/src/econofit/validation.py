"""Input checks shared by the estimator wrappers."""

from __future__ import annotations

import numpy as np
from sklearn.exceptions import NotFittedError

from .errors import InsufficientDataError, ValidationError


def check_1d_feature(X, name: str = "X") -> np.ndarray:
    """Accept a vector or a single-column matrix and return a float vector."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValidationError(f"{name} must have exactly one feature, got {arr.shape[1]}")
        arr = arr[:, 0]
    elif arr.ndim != 1:
        raise ValidationError(f"{name} must be 1-D or a single column")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_xy(X, y, min_samples: int = 1) -> tuple[np.ndarray, np.ndarray]:
    x = check_1d_feature(X)
    target = np.asarray(y, dtype=float)
    if target.ndim != 1:
        raise ValidationError("y must be one-dimensional")
    if not np.all(np.isfinite(target)):
        raise ValidationError("y contains non-finite values")
    if len(x) != len(target):
        raise ValidationError(f"X and y lengths differ: {len(x)} vs {len(target)}")
    if len(x) < min_samples:
        raise InsufficientDataError(f"need at least {min_samples} samples, got {len(x)}")
    return x, target


def check_fitted(estimator, attribute: str = "result_") -> None:
    if not hasattr(estimator, attribute):
        raise NotFittedError(f"{type(estimator).__name__} is not fitted yet; call fit first")
