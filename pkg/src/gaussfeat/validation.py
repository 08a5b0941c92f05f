"""Small input-validation helpers used by the estimator-style classes."""

import numbers

import numpy as np

from .errors import ConfigError


class NotFittedError(ValueError):
    """Raised when predict/transform is called before fit."""


def check_array(X, name="X", ndim=2, dtype=np.float64):
    """Coerce to a finite ndarray of the requested rank."""
    arr = np.asarray(X, dtype=dtype)
    if arr.ndim == 1 and ndim == 2:
        arr = arr.reshape(1, -1)
    if arr.ndim != ndim:
        raise ConfigError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ConfigError(f"{name} is empty")
    if not np.isfinite(arr).all():
        raise ConfigError(f"{name} contains NaN or infinity")
    return arr


def check_X_y(X, y):
    X = check_array(X, "X")
    y = np.asarray(y)
    if y.ndim != 1:
        raise ConfigError(f"y must be 1-dimensional, got shape {y.shape}")
    if len(y) != len(X):
        raise ConfigError(f"X has {len(X)} rows but y has {len(y)}")
    return X, y


def check_is_fitted(estimator, attribute):
    if getattr(estimator, attribute, None) is None:
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted yet; call fit() first"
        )


def check_seed(seed):
    if not isinstance(seed, numbers.Integral) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"seed must be a nonnegative integer, got {seed!r}")
    return int(seed)
