"""Frequency-domain Gaussian pseudo-likelihood and its exact expansions.

The pseudo-likelihood treats the real DFT coefficients of the data as
independent Gaussians with variances 2*pi*f(lambda_j).  This module
provides its log-density, the exact time-domain Gaussian log-likelihood
as an oracle, the conjugate conditional posterior of the regression
coefficients for a fixed spectrum, and the decomposition of the
log-likelihood ratio into score, curvature, and remainder pieces.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import linalg as sla

from . import linalg
from .fourier import DesignSpec, FreqCov, build_dft_matrix, build_freq_cov, dft_apply
from .fourier import FAST_TRANSFORM_MIN_N
from .validation import as_matrix, as_vector

__all__ = [
    "WhittleModel",
    "ThetaPosterior",
    "GaussianPrior",
    "LanParts",
    "whittle_loglik",
    "true_gaussian_loglik",
    "conditional_theta_posterior",
    "lan_decompose",
    "lan_remainder",
]

SpectrumLike = Union[FreqCov, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class WhittleModel:
    """Observations, design, and their frequency-domain images."""

    Z: np.ndarray
    design: DesignSpec
    Ztilde: np.ndarray
    n: int

    def __post_init__(self):
        if self.Z.shape != (self.n,) or self.Ztilde.shape != (self.n,):
            raise ValueError("Z and Ztilde must be length-n vectors")
        # Parseval: the transform is orthogonal.
        if not np.isclose(
            np.linalg.norm(self.Ztilde), np.linalg.norm(self.Z), rtol=1e-8, atol=1e-8
        ):
            raise ValueError("transform is not norm-preserving; inconsistent inputs")

    @classmethod
    def from_data(cls, Z, design: DesignSpec) -> "WhittleModel":
        Z = as_vector(Z, "Z")
        n = design.n
        if Z.shape[0] != n:
            raise ValueError("Z length must match the design")
        if n >= FAST_TRANSFORM_MIN_N:
            zt = dft_apply(Z)
        else:
            zt = build_dft_matrix(n).rows @ Z
        return cls(Z=Z, design=design, Ztilde=zt, n=n)


def _freq_diag(f: SpectrumLike, n: int) -> np.ndarray:
    if isinstance(f, FreqCov):
        if f.n != n:
            raise ValueError("FreqCov size does not match the model")
        return f.diag
    return build_freq_cov(f, n).diag


def whittle_loglik(model: WhittleModel, theta, f: SpectrumLike) -> float:
    """Log pseudo-likelihood of the data at coefficients theta, spectrum f.

    Equals -(n/2) log 2 pi - (1/2) sum log d_j - (1/2) sum r_j^2 / d_j
    with d_j the diagonal covariance entries 2*pi*f(lambda_j) and r the
    frequency-domain residual.  Computed entirely in log space.
    """
    theta = as_vector(np.atleast_1d(theta), "theta")
    d = _freq_diag(f, model.n)
    resid = model.Ztilde - model.design.Xtilde @ theta
    return float(
        -0.5 * model.n * np.log(2.0 * np.pi)
        - 0.5 * np.sum(np.log(d))
        - 0.5 * np.sum(resid * resid / d)
    )


def true_gaussian_loglik(model: WhittleModel, theta, Sigma: np.ndarray) -> float:
    """Exact Gaussian log-likelihood with time-domain covariance Sigma."""
    theta = as_vector(np.atleast_1d(theta), "theta")
    Sigma = as_matrix(Sigma, "Sigma")
    if Sigma.shape != (model.n, model.n):
        raise ValueError("Sigma must be n x n")
    try:
        c, low = sla.cho_factor(Sigma, lower=True, check_finite=False)
    except sla.LinAlgError as exc:
        raise ValueError("Sigma must be positive definite") from exc
    resid = model.Z - model.design.X @ theta
    quad = resid @ sla.cho_solve((c, low), resid, check_finite=False)
    logdet = 2.0 * np.sum(np.log(np.diag(c)))
    return float(-0.5 * model.n * np.log(2.0 * np.pi) - 0.5 * logdet - 0.5 * quad)


@dataclass(frozen=True)
class ThetaPosterior:
    """Gaussian conditional posterior of the regression coefficients."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        r = self.mean.shape[0]
        if self.cov.shape != (r, r):
            raise ValueError("cov must be r x r")
        if not np.allclose(self.cov, self.cov.T, atol=1e-10):
            raise ValueError("cov must be symmetric")
        if np.any(np.linalg.eigvalsh(self.cov) <= 0.0):
            raise ValueError("cov must be positive definite")


@dataclass(frozen=True)
class GaussianPrior:
    """Proper Gaussian prior on the coefficients."""

    mean: np.ndarray
    cov: np.ndarray


def conditional_theta_posterior(
    model: WhittleModel, f: SpectrumLike, prior: Optional[GaussianPrior] = None
) -> ThetaPosterior:
    """Conditional posterior of theta for a fixed spectrum.

    With a flat prior the posterior is Gaussian with covariance
    (X~' D^{-1} X~)^{-1} and mean cov * X~' D^{-1} Z~; a proper Gaussian
    prior enters through the usual precision-weighted combination.
    """
    d = _freq_diag(f, model.n)
    xt = model.design.Xtilde
    wx = xt / d[:, None]
    prec = xt.T @ wx
    rhs = wx.T @ model.Ztilde
    if prior is not None:
        prior_prec = linalg.inv_spd(as_matrix(prior.cov, "prior cov"))
        prec = prec + prior_prec
        rhs = rhs + prior_prec @ as_vector(prior.mean, "prior mean")
    cov = linalg.inv_spd(prec)
    cov = 0.5 * (cov + cov.T)
    mean = cov @ rhs
    return ThetaPosterior(mean=mean, cov=cov)


@dataclass(frozen=True)
class LanParts:
    """Score/curvature pieces of the log pseudo-likelihood ratio.

    S is the curvature matrix X~' D0^{-1} X~ at the reference spectrum,
    G the standardized score S^{-1/2} X~' D0^{-1} (Z~ - X~ theta0).  The
    remainder R(theta, f) collects what the spectrum mismatch f vs f0
    contributes; the identity

        loglik(theta, f) - loglik(theta0, f)
            = (theta-theta0)' S^{1/2} G
              - (theta-theta0)' S (theta-theta0) / 2 + R(theta, f)

    holds exactly for every (theta, f), not just asymptotically.
    """

    S: np.ndarray
    G: np.ndarray
    theta0: np.ndarray
    sqrt_S: np.ndarray = field(repr=False)
    _xtilde: np.ndarray = field(repr=False)
    _resid0: np.ndarray = field(repr=False)
    _d0: np.ndarray = field(repr=False)

    def remainder(self, theta, f: SpectrumLike) -> float:
        """R(theta, f) = R1 - R2/2 from the inverse-covariance gap."""
        theta = as_vector(np.atleast_1d(theta), "theta")
        d = _freq_diag(f, self._resid0.shape[0])
        gap = 1.0 / d - 1.0 / self._d0
        delta = theta - self.theta0
        xd = self._xtilde @ delta
        r1 = xd @ (gap * self._resid0)
        r2 = xd @ (gap * xd)
        return float(r1 - 0.5 * r2)


def lan_decompose(model: WhittleModel, theta0, f0: SpectrumLike) -> LanParts:
    """Exact score/curvature/remainder decomposition at (theta0, f0)."""
    theta0 = as_vector(np.atleast_1d(theta0), "theta0")
    d0 = _freq_diag(f0, model.n)
    xt = model.design.Xtilde
    S = xt.T @ (xt / d0[:, None])
    S = 0.5 * (S + S.T)
    resid0 = model.Ztilde - xt @ theta0
    score = xt.T @ (resid0 / d0)
    sqrt_S = linalg.sqrtm_spd(S)
    G = linalg.solve_spd(sqrt_S, score)
    return LanParts(
        S=S, G=G, theta0=theta0, sqrt_S=sqrt_S, _xtilde=xt, _resid0=resid0, _d0=d0
    )


def lan_remainder(parts: LanParts, theta, f: SpectrumLike) -> float:
    """Remainder term of the decomposition; zero whenever f equals f0."""
    return parts.remainder(theta, f)
