"""Input validation helpers shared across the package."""
from __future__ import annotations

import numpy as np

__all__ = [
    "as_vector",
    "as_matrix",
    "check_positive",
    "check_in_unit_interval",
    "check_column_rank",
]

# Relative singular-value threshold for rank checks.
RANK_RTOL = 1e-8


def as_vector(x, name: str = "x") -> np.ndarray:
    """Coerce to a 1-d float array, rejecting anything else."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_matrix(x, name: str = "X") -> np.ndarray:
    """Coerce to a 2-d float array; column vectors may be passed as 1-d."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_in_unit_interval(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def check_column_rank(X: np.ndarray, name: str = "X") -> None:
    """Reject rank-deficient matrices.

    Uses the smallest singular value with a relative threshold of
    RANK_RTOL times the largest singular value.
    """
    s = np.linalg.svd(X, compute_uv=False)
    if s.size == 0 or s[-1] <= RANK_RTOL * s[0]:
        raise ValueError(f"{name} is numerically rank-deficient (min sv {s[-1]:.3e})")
