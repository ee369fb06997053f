"""Small dense linear-algebra helpers with deterministic fallbacks.

All r x r solves go through Cholesky first; if the factorization fails
the routines fall back to a symmetric eigendecomposition with an
eigenvalue floor, so mildly degenerate designs degrade gracefully
instead of raising deep inside a chain.
"""
from __future__ import annotations

import numpy as np
from scipy import linalg as sla

__all__ = ["solve_spd", "inv_spd", "sqrtm_spd", "invsqrtm_spd", "chol_lower"]

# Eigenvalue floor for the solve fallback, relative to the trace.
SOLVE_EIG_FLOOR = 1e-12
# Clipping threshold for matrix square roots, relative to the top eigenvalue.
SQRT_EIG_CLIP = 1e-14


def _eig_floored(A: np.ndarray, rel_floor: float) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(A)
    floor = rel_floor * max(np.trace(A), np.finfo(float).tiny)
    return np.maximum(vals, floor), vecs


def chol_lower(A: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor; raises ValueError on non-pd input."""
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise ValueError("matrix is not positive definite") from exc


def solve_spd(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b for symmetric positive definite A."""
    try:
        c, low = sla.cho_factor(A, lower=True, check_finite=False)
        return sla.cho_solve((c, low), b, check_finite=False)
    except sla.LinAlgError:
        vals, vecs = _eig_floored(A, SOLVE_EIG_FLOOR)
        return vecs @ ((vecs.T @ b).T / vals).T


def inv_spd(A: np.ndarray) -> np.ndarray:
    return solve_spd(A, np.eye(A.shape[0]))


def sqrtm_spd(A: np.ndarray) -> np.ndarray:
    """Symmetric square root via eigendecomposition with eigenvalue clipping."""
    vals, vecs = np.linalg.eigh(A)
    vals = np.clip(vals, SQRT_EIG_CLIP * vals[-1], None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def invsqrtm_spd(A: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(A)
    vals = np.clip(vals, SQRT_EIG_CLIP * vals[-1], None)
    return (vecs / np.sqrt(vals)) @ vecs.T
