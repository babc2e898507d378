"""Input validation shared by the estimator classes and the functional API."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .exceptions import DomainError


def check_sample_array(X, allow_empty=False) -> np.ndarray:
    """Coerce a 1-D sample (or an ``(n, 1)`` column) to a finite float vector."""
    arr = check_array(
        X,
        ensure_2d=False,
        dtype=np.float64,
        ensure_min_samples=0 if allow_empty else 1,
    )
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"expected a single sample (1-D or one column), got shape {arr.shape}")
        arr = arr[:, 0]
    return arr


def check_sample_batch(X) -> np.ndarray:
    """Coerce to a 2-D array whose rows are independent samples."""
    arr = check_array(np.atleast_2d(np.asarray(X, dtype=float)), dtype=np.float64)
    return arr


def check_window(t1, t2) -> tuple[float, float]:
    t1, t2 = float(t1), float(t2)
    if np.isnan(t1) or np.isnan(t2) or not t1 < t2:
        raise DomainError(f"window requires t1 < t2, got ({t1}, {t2})")
    return t1, t2
