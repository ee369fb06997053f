"""Real orthogonal DFT matrices, frequency-domain covariances, and designs.

The transform used throughout maps a length-n series to the coefficient
vector (constant, cos_1, sin_1, ..., cos_N, sin_N[, alternating]) with
N = floor((n-1)/2); the final alternating row exists only for even n.
Entries follow the convention with time index t running from 1 to n, so
row j of the complex building block is n^{-1/2} (e_j, e_j^2, ..., e_j^n)
with e_j = exp(-2*pi*i*j/n).  The matrix is orthogonal, which makes the
frequency-domain covariance of a stationary series asymptotically the
diagonal matrix with entries 2*pi*f(lambda_j).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .validation import as_matrix, check_column_rank

__all__ = [
    "DftMatrix",
    "FreqCov",
    "DesignSpec",
    "build_dft_matrix",
    "build_freq_cov",
    "make_design",
    "gram_spectrum",
    "fourier_frequencies",
    "dft_apply",
    "dft_apply_inverse",
]

# Above this size make_design uses the FFT-based transform instead of a
# dense matrix product.
FAST_TRANSFORM_MIN_N = 1025


def fourier_frequencies(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distinct Fourier frequencies and their layout in the transform.

    Parameters
    ----------
    n : int
        Sample size, n >= 2.

    Returns
    -------
    distinct : ndarray
        Frequencies 2*pi*j/n for j = 0..N, plus pi when n is even.
    expand : ndarray of int
        Index map of length n; position q of the transformed vector
        carries frequency distinct[expand[q]].  Interior frequencies
        appear twice (cosine and sine rows), 0 and pi once.
    multiplicity : ndarray of int
        Number of positions per distinct frequency.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    half = (n - 1) // 2
    js = np.arange(half + 1)
    distinct = 2.0 * np.pi * js / n
    expand = np.concatenate(([0], np.repeat(np.arange(1, half + 1), 2)))
    if n % 2 == 0:
        distinct = np.append(distinct, np.pi)
        expand = np.append(expand, half + 1)
    multiplicity = np.bincount(expand, minlength=distinct.size)
    return distinct, expand.astype(np.intp), multiplicity


@dataclass(frozen=True)
class DftMatrix:
    """Orthogonal real DFT matrix of size n."""

    n: int
    rows: np.ndarray

    def __post_init__(self):
        if self.rows.shape != (self.n, self.n):
            raise ValueError("rows must be an n x n matrix")


def build_dft_matrix(n: int) -> DftMatrix:
    """Construct the dense orthogonal real DFT matrix.

    Row 0 is constant n^{-1/2}; rows 2j-1 and 2j hold sqrt(2/n) times
    the cosine and (negated) sine of 2*pi*j*t/n for t = 1..n; for even n
    the last row alternates n^{-1/2} (-1)^t.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    t = np.arange(1, n + 1)
    half = (n - 1) // 2
    rows = np.empty((n, n))
    rows[0] = n ** -0.5
    scale = np.sqrt(2.0 / n)
    for j in range(1, half + 1):
        ang = (2.0 * np.pi * j / n) * t
        rows[2 * j - 1] = scale * np.cos(ang)
        rows[2 * j] = -scale * np.sin(ang)
    if n % 2 == 0:
        # (-1)^t for t = 1..n
        rows[n - 1] = (n ** -0.5) * np.where(t % 2 == 0, 1.0, -1.0)
    return DftMatrix(n=n, rows=rows)


def dft_apply(v: np.ndarray) -> np.ndarray:
    """Apply the real DFT to the columns of v without forming the matrix.

    Equivalent to build_dft_matrix(n).rows @ v, computed with one rfft
    per column.  Accepts 1-d or 2-d input.
    """
    v = np.asarray(v, dtype=float)
    single = v.ndim == 1
    if single:
        v = v[:, None]
    n = v.shape[0]
    half = (n - 1) // 2
    spec = np.fft.rfft(v, axis=0)
    # The t = 1..n convention shifts the usual 0-based transform by one
    # sample, i.e. a phase of exp(-2*pi*i*j/n) on row j.
    phase = np.exp(-2j * np.pi * np.arange(spec.shape[0]) / n)
    spec = spec * phase[:, None]
    out = np.empty_like(v)
    out[0] = spec[0].real / np.sqrt(n)
    scale = np.sqrt(2.0 / n)
    if half >= 1:
        out[1 : 2 * half + 1 : 2] = scale * spec[1 : half + 1].real
        out[2 : 2 * half + 2 : 2] = scale * spec[1 : half + 1].imag
    if n % 2 == 0:
        out[n - 1] = spec[n // 2].real / np.sqrt(n)
    return out[:, 0] if single else out


def dft_apply_inverse(y: np.ndarray) -> np.ndarray:
    """Apply the transpose (= inverse) of the real DFT to columns of y."""
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    if single:
        y = y[:, None]
    n = y.shape[0]
    half = (n - 1) // 2
    spec = np.zeros((n // 2 + 1, y.shape[1]), dtype=complex)
    spec[0] = np.sqrt(n) * y[0]
    if half >= 1:
        spec[1 : half + 1] = np.sqrt(n / 2.0) * (
            y[1 : 2 * half + 1 : 2] + 1j * y[2 : 2 * half + 2 : 2]
        )
    if n % 2 == 0:
        spec[n // 2] = np.sqrt(n) * y[n - 1]
    phase = np.exp(2j * np.pi * np.arange(spec.shape[0]) / n)
    out = np.fft.irfft(spec * phase[:, None], n=n, axis=0)
    return out[:, 0] if single else out


@dataclass(frozen=True)
class FreqCov:
    """Diagonal frequency-domain covariance with entries 2*pi*f(lambda_j).

    Interior frequencies occupy two adjacent positions; frequency 0 and,
    for even n, frequency pi occupy one each.
    """

    n: int
    diag: np.ndarray

    def __post_init__(self):
        if self.diag.shape != (self.n,):
            raise ValueError("diag must have length n")
        if np.any(self.diag <= 0.0) or not np.all(np.isfinite(self.diag)):
            raise ValueError("diagonal entries must be strictly positive and finite")


def build_freq_cov(f: Callable[[np.ndarray], np.ndarray], n: int) -> FreqCov:
    """Evaluate a spectral density on the Fourier grid of size n.

    Parameters
    ----------
    f : callable
        Spectral density on [0, pi]; must be strictly positive at the
        Fourier frequencies.
    n : int
        Sample size.

    Returns
    -------
    FreqCov with the duplication layout described in the class docstring.
    """
    distinct, expand, _ = fourier_frequencies(n)
    vals = np.asarray(f(distinct), dtype=float)
    if vals.shape != distinct.shape:
        vals = np.broadcast_to(vals, distinct.shape).astype(float)
    if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
        bad = distinct[(vals <= 0.0) | ~np.isfinite(vals)]
        raise ValueError(f"spectral density not strictly positive at frequencies {bad}")
    return FreqCov(n=n, diag=2.0 * np.pi * vals[expand])


@dataclass(frozen=True)
class DesignSpec:
    """A regression design together with its frequency-domain image."""

    kind: str
    n: int
    X: np.ndarray
    Xtilde: np.ndarray = field(repr=False)

    @property
    def r(self) -> int:
        return self.X.shape[1]


def _trend_column(n: int) -> np.ndarray:
    return np.arange(1, n + 1) / n


def _seasonal_columns(n: int, period: int, drop_last: bool = True) -> np.ndarray:
    t = np.arange(n)
    cols = period - 1 if drop_last else period
    out = np.zeros((n, cols))
    for c in range(cols):
        out[t % period == c, c] = 1.0
    return out


def make_design(
    kind: str,
    n: int,
    *,
    period: Optional[int] = None,
    X: Optional[np.ndarray] = None,
    intercept: bool = True,
) -> DesignSpec:
    """Build one of the standard designs and its transform.

    Parameters
    ----------
    kind : {"mean", "linear_trend", "trend_seasonal", "custom"}
        mean: single column of ones.  linear_trend: intercept plus
        standardized time t/n (set intercept=False for the bare trend
        column).  trend_seasonal: intercept, t/n, and period-1 seasonal
        indicators, the last seasonal level being absorbed into the
        intercept.  custom: caller-supplied matrix.
    n : int
        Sample size.
    period : int, optional
        Seasonal period, required for trend_seasonal; period = 1 reduces
        to the linear trend design.
    X : ndarray, optional
        Design matrix for kind="custom".
    intercept : bool
        Only honoured by linear_trend.

    Returns
    -------
    DesignSpec with Xtilde equal to the transform applied columnwise.
    """
    if kind == "mean":
        mat = np.ones((n, 1))
    elif kind == "linear_trend":
        trend = _trend_column(n)[:, None]
        mat = np.hstack([np.ones((n, 1)), trend]) if intercept else trend
    elif kind == "trend_seasonal":
        if period is None or period < 1:
            raise ValueError("trend_seasonal requires a period >= 1")
        if period >= 2 and period + 1 > n:
            raise ValueError("period too large for the sample size")
        mat = np.hstack(
            [np.ones((n, 1)), _trend_column(n)[:, None], _seasonal_columns(n, period)]
        )
    elif kind == "custom":
        if X is None:
            raise ValueError("custom design requires X")
        mat = as_matrix(X, "X")
        if mat.shape[0] != n:
            raise ValueError("custom design must have n rows")
    else:
        raise ValueError(f"unknown design kind {kind!r}")
    if n < mat.shape[1]:
        raise ValueError("need n >= number of design columns")
    check_column_rank(mat, "design matrix")
    if n >= FAST_TRANSFORM_MIN_N:
        xt = dft_apply(mat)
    else:
        xt = build_dft_matrix(n).rows @ mat
    return DesignSpec(kind=kind, n=n, X=mat, Xtilde=xt)


def gram_spectrum(design: DesignSpec) -> tuple[float, float]:
    """Extreme eigenvalues of X'X / n as (smallest, largest)."""
    gram = design.X.T @ design.X / design.n
    vals = np.linalg.eigvalsh(gram)
    return float(vals[0]), float(vals[-1])
