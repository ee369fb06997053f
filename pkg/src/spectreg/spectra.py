"""Spectral density models and transforms.

Contains the Bernstein mixture representation used by the nonparametric
prior, the AR(1)/MA(1) parametric spectra, transforms between spectra
and autocovariances, a grid Lipschitz norm with the associated bounded
class membership test, and Gaussian time-series simulation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy import linalg as sla
from scipy.special import betaln, xlogy

from .validation import check_positive

__all__ = [
    "BernsteinSpectrum",
    "Ar1Spec",
    "TruncationBounds",
    "bernstein_eval",
    "bernstein_table",
    "bernstein_approximant",
    "ar1_spectral",
    "ma1_spectral",
    "ar1_covariance",
    "autocov_from_spectral",
    "lipschitz_norm",
    "in_truncation_class",
    "simulate_ts",
    "QuadratureError",
]

# Composite Simpson panel count for spectral <-> autocovariance transforms.
SIMPSON_PANELS = 4096
# Default grid for the Lipschitz norm and class membership checks.
LIPSCHITZ_GRID = 512


class QuadratureError(RuntimeError):
    """Raised when a fixed-panel quadrature fails its refinement check."""


def bernstein_table(k: int, x: np.ndarray) -> np.ndarray:
    """Beta(j, k-j+1) densities for j = 1..k evaluated at points x.

    Returns a (k, len(x)) array.  Boundary arguments use the limiting
    value when the relevant shape parameter equals 1 and 0 otherwise;
    shapes below 1 never occur in this mixture family.
    """
    if k < 1:
        raise ValueError("degree k must be >= 1")
    x = np.asarray(x, dtype=float)
    j = np.arange(1, k + 1, dtype=float)[:, None]
    logpdf = xlogy(j - 1.0, x[None, :]) + xlogy(k - j, 1.0 - x[None, :])
    logpdf -= betaln(j, k - j + 1.0)
    return np.exp(logpdf)


@dataclass(frozen=True)
class BernsteinSpectrum:
    """Nonnegative mixture of Beta(j, k-j+1) densities on rescaled [0, pi].

    f(omega) = sum_j weights[j-1] * b(omega/pi | j, k-j+1).  Weights are
    bin masses of a measure on [0, 1], optionally carrying an overall
    scale, so integral_0^pi f = pi * sum(weights).
    """

    k: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if self.k < 1:
            raise ValueError("degree k must be >= 1")
        if w.shape != (self.k,):
            raise ValueError("weights must have length k")
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be nonnegative and finite")

    def __call__(self, omega) -> np.ndarray:
        return bernstein_eval(self, omega)


def bernstein_eval(spec: BernsteinSpectrum, omega) -> Union[float, np.ndarray]:
    """Evaluate the mixture at omega in [0, pi] (scalar or array)."""
    om = np.asarray(omega, dtype=float)
    if np.any(om < 0.0) or np.any(om > np.pi):
        raise ValueError("omega must lie in [0, pi]")
    table = bernstein_table(spec.k, np.atleast_1d(om) / np.pi)
    vals = spec.weights @ table
    return float(vals[0]) if om.ndim == 0 else vals


def bernstein_approximant(
    f0: Callable[[np.ndarray], np.ndarray], k: int, panels_per_bin: int = 64
) -> BernsteinSpectrum:
    """Degree-k mixture approximating a target spectral density.

    The weight of bin j is the integral of f0 over ((j-1)pi/k, j pi/k]
    divided by pi, i.e. the bin mass of the measure with density
    f0(pi u) on the unit interval; with that scaling the approximant
    reproduces constants exactly and converges to smooth targets.
    """
    weights = np.empty(k)
    for j in range(k):
        a, b = j * np.pi / k, (j + 1) * np.pi / k
        weights[j] = _simpson(f0, a, b, panels_per_bin) / np.pi
    return BernsteinSpectrum(k=k, weights=weights)


@dataclass(frozen=True)
class Ar1Spec:
    """Stationary AR(1) parameters: |alpha| < 1, innovation variance sigma2."""

    alpha: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not abs(self.alpha) < 1.0:
            raise ValueError("alpha must satisfy |alpha| < 1")
        check_positive(self.sigma2, "sigma2")

    def __call__(self, omega) -> np.ndarray:
        return ar1_spectral(self, omega)


def ar1_spectral(spec: Ar1Spec, omega) -> Union[float, np.ndarray]:
    """AR(1) spectral density sigma2 / (2 pi (1 - 2 alpha cos w + alpha^2))."""
    om = np.asarray(omega, dtype=float)
    vals = spec.sigma2 / (
        2.0 * np.pi * (1.0 - 2.0 * spec.alpha * np.cos(om) + spec.alpha**2)
    )
    return float(vals) if om.ndim == 0 else vals


def ma1_spectral(b: float, sigma2: float, omega) -> Union[float, np.ndarray]:
    """MA(1) spectral density sigma2 (1 + 2 b cos w + b^2) / (2 pi)."""
    om = np.asarray(omega, dtype=float)
    vals = sigma2 * (1.0 + 2.0 * b * np.cos(om) + b * b) / (2.0 * np.pi)
    return float(vals) if om.ndim == 0 else vals


def ar1_covariance(spec: Ar1Spec, n: int) -> np.ndarray:
    """Toeplitz covariance with entries sigma2 alpha^|i-j| / (1 - alpha^2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    first = spec.sigma2 * spec.alpha ** np.arange(n) / (1.0 - spec.alpha**2)
    return sla.toeplitz(first)


def _simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, panels: int) -> float:
    # panels must be even for the composite rule
    if panels % 2:
        panels += 1
    x = np.linspace(a, b, panels + 1)
    y = np.asarray(f(x), dtype=float)
    h = (b - a) / panels
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(h / 3.0 * (w @ y))


def autocov_from_spectral(f: Callable[[np.ndarray], np.ndarray], h: int) -> float:
    """Autocovariance at lag h from a spectral density on [0, pi].

    Computes integral_0^{2 pi} f(w) exp(i h w) dw via the even extension
    f(2 pi - w) = f(w), which collapses to 2 integral_0^pi f cos(h w).
    Composite Simpson with a fixed panel count; a halved-resolution
    refinement check guards against unnoticed quadrature failure.
    """
    h = int(abs(h))

    def integrand(w: np.ndarray) -> np.ndarray:
        return np.asarray(f(w), dtype=float) * np.cos(h * w)

    full = 2.0 * _simpson(integrand, 0.0, np.pi, SIMPSON_PANELS)
    coarse = 2.0 * _simpson(integrand, 0.0, np.pi, SIMPSON_PANELS // 2)
    if not np.isfinite(full) or abs(full - coarse) > 1e-6 * (1.0 + abs(full)):
        raise QuadratureError(
            f"autocovariance quadrature did not converge at lag {h}: "
            f"{full} vs {coarse} at half resolution"
        )
    return full


def lipschitz_norm(
    f: Callable[[np.ndarray], np.ndarray], grid_size: int = LIPSCHITZ_GRID
) -> float:
    """Grid approximation of sup|f| plus the Lipschitz constant on [0, pi].

    The slope term uses adjacent-pair difference quotients on an
    equispaced grid, which attains the pairwise supremum for piecewise
    monotone slopes.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    x = np.linspace(0.0, np.pi, grid_size)
    y = np.asarray(f(x), dtype=float)
    slopes = np.abs(np.diff(y)) / np.diff(x)
    return float(np.max(np.abs(y)) + np.max(slopes))


@dataclass(frozen=True)
class TruncationBounds:
    """Bounded spectral class: f >= tau0 and Lipschitz norm <= tau1."""

    tau0: float
    tau1: float

    def __post_init__(self):
        check_positive(self.tau0, "tau0")
        check_positive(self.tau1, "tau1")
        if not self.tau0 < self.tau1:
            raise ValueError("need tau0 < tau1")


def in_truncation_class(
    f: Callable[[np.ndarray], np.ndarray],
    bounds: TruncationBounds,
    grid_size: int = LIPSCHITZ_GRID,
) -> bool:
    """Grid check of membership in the bounded spectral class."""
    x = np.linspace(0.0, np.pi, grid_size)
    y = np.asarray(f(x), dtype=float)
    if np.min(y) < bounds.tau0:
        return False
    return lipschitz_norm(f, grid_size) <= bounds.tau1


def simulate_ts(
    spec: Union[Ar1Spec, np.ndarray], n: int, seed: Union[int, np.random.SeedSequence]
) -> np.ndarray:
    """Draw a mean-zero stationary Gaussian series of length n.

    AR(1) parameters use the O(n) recursion started from the stationary
    distribution; a covariance matrix argument uses its lower Cholesky
    factor.  The seed fully determines the output.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if isinstance(spec, Ar1Spec):
        eps = rng.standard_normal(n) * np.sqrt(spec.sigma2)
        out = np.empty(n)
        out[0] = eps[0] / np.sqrt(1.0 - spec.alpha**2)
        for t in range(1, n):
            out[t] = spec.alpha * out[t - 1] + eps[t]
        return out
    cov = np.asarray(spec, dtype=float)
    if cov.shape != (n, n):
        raise ValueError("covariance must be n x n")
    try:
        lower = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance must be positive definite") from exc
    return lower @ rng.standard_normal(n)
