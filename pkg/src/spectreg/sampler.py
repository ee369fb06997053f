"""Stick-breaking spectral prior and the Metropolis-within-Gibbs chain.

The spectrum is a Beta-density mixture of random degree k whose weights
come from binning a truncated stick-breaking measure on [0, 1], scaled
by a positive level tau.  Coefficients are drawn exactly from their
Gaussian conditional; the spectrum state moves through single-site
Metropolis updates (logit walk on sticks, reflected walk on locations,
discrete walk on the degree, log walk on the scale).  Proposal scales
adapt toward a target acceptance rate during burnin only, so detailed
balance holds for every retained draw.

Randomness is counter-based: iteration i uses a fresh generator seeded
from (chain key, i), which makes checkpoint restarts bit-for-bit
reproducible.
"""
from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from scipy import linalg as sla

from .fourier import fourier_frequencies
from .spectra import BernsteinSpectrum, TruncationBounds, bernstein_table
from .validation import check_positive
from .whittle import GaussianPrior, WhittleModel

__all__ = [
    "DpState",
    "PosteriorDraw",
    "SamplerConfig",
    "ChainResult",
    "ChainSummary",
    "ChainDivergedError",
    "prior_draw",
    "gibbs_theta",
    "mh_block_f",
    "run_chain",
    "summarize",
    "default_stick_limit",
]

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1

# Exactly interpolated data (a constant series under a seasonal design,
# say) rewards ever-smaller spectra without bound; left alone the state
# walks into denormals and the implied frequency variance underflows to
# an exact zero.  Proposals below this floor score -inf, so the chain
# stalls at the representability boundary instead of crashing.  The
# margin leaves room for the cache rebuild at iteration boundaries,
# which recomputes the mixture in a different summation order.
SPECTRUM_FLOOR = 1e-280


class ChainDivergedError(RuntimeError):
    """Raised when the log pseudo-likelihood becomes non-finite."""

    def __init__(self, iteration: int, message: str = ""):
        self.iteration = iteration
        super().__init__(
            f"chain diverged at iteration {iteration}" + (f": {message}" if message else "")
        )


def default_stick_limit(n: int) -> int:
    """Stick truncation level 20 + ceil(sqrt(n)); truncation error is geometric."""
    return 20 + math.ceil(math.sqrt(n))


@dataclass(frozen=True)
class SamplerConfig:
    """Tuning knobs of the spectrum sampler.

    p(k) is proportional to exp(-k_decay * k^2) on 1..k_max; tau carries
    a Gamma(tau_shape, tau_rate) prior; sticks are Beta(1, M) with
    uniform base measure.  Proposal scales are starting points for the
    burnin adaptation unless adapt=False.
    """

    iterations: int = 6000
    burnin: int = 2000
    thinning: int = 2
    M: float = 1.0
    k_decay: float = 0.01
    k_max: int = 500
    tau_shape: float = 0.001
    tau_rate: float = 0.001
    stick_limit: Optional[int] = None
    v_scale: float = 0.5
    u_scale: float = 0.1
    tau_scale: float = 0.5
    k_steps: Sequence[int] = (1, 2, 3)
    target_accept: float = 0.3
    adapt: bool = True
    truncation_bounds: Optional[TruncationBounds] = None
    theta_prior: Optional[GaussianPrior] = None
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.burnin < self.iterations:
            raise ValueError("need 0 <= burnin < iterations")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")
        check_positive(self.M, "M")
        check_positive(self.k_decay, "k_decay")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        check_positive(self.tau_shape, "tau_shape")
        check_positive(self.tau_rate, "tau_rate")
        for name in ("v_scale", "u_scale", "tau_scale"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if len(self.k_steps) == 0 or any(s < 0 for s in self.k_steps):
            raise ValueError("k_steps must be nonempty with entries >= 0")
        if not 0.0 < self.target_accept < 1.0:
            raise ValueError("target_accept must be in (0, 1)")

    def k_prior_logpmf(self) -> np.ndarray:
        """Unnormalized log p(k) on 1..k_max, normalized before return."""
        k = np.arange(1, self.k_max + 1, dtype=float)
        logp = -self.k_decay * k * k
        logp -= np.log(np.sum(np.exp(logp - logp.max()))) + logp.max()
        return logp


@dataclass(frozen=True)
class DpState:
    """Spectrum state: sticks, locations, Bernstein degree, and scale."""

    sticks: np.ndarray
    locations: np.ndarray
    k: int
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "sticks", np.asarray(self.sticks, dtype=float))
        object.__setattr__(self, "locations", np.asarray(self.locations, dtype=float))
        if self.sticks.shape != self.locations.shape or self.sticks.ndim != 1:
            raise ValueError("sticks and locations must be equal-length vectors")
        if np.any((self.sticks <= 0.0) | (self.sticks >= 1.0)):
            raise ValueError("sticks must lie strictly inside (0, 1)")
        if np.any((self.locations < 0.0) | (self.locations > 1.0)):
            raise ValueError("locations must lie in [0, 1]")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        check_positive(self.tau, "tau")

    @property
    def stick_limit(self) -> int:
        return self.sticks.shape[0]

    def stick_weights(self) -> np.ndarray:
        """Mixture weights; residual stick mass folds into the last one."""
        return _stick_weights(self.sticks)

    def bernstein_weights(self) -> np.ndarray:
        """Bin masses times tau; length k, summing to tau."""
        p = self.stick_weights()
        bins = _bin_of(self.locations, self.k)
        return self.tau * np.bincount(bins, weights=p, minlength=self.k + 1)[1:]

    def spectrum(self) -> BernsteinSpectrum:
        return BernsteinSpectrum(k=self.k, weights=self.bernstein_weights())


def _stick_weights(sticks: np.ndarray) -> np.ndarray:
    L = sticks.shape[0]
    p = np.empty(L)
    remaining = np.cumprod(1.0 - sticks)
    p[0] = sticks[0]
    p[1:] = sticks[1:] * remaining[:-1]
    # residual mass closes the truncated measure to total 1
    p[L - 1] = remaining[L - 2] if L > 1 else 1.0
    return p


def _bin_of(locations: np.ndarray, k: int) -> np.ndarray:
    """Bin index in 1..k of each location under the partition ((j-1)/k, j/k]."""
    b = np.ceil(np.asarray(locations) * k).astype(np.intp)
    return np.clip(b, 1, k)


@dataclass(frozen=True)
class PosteriorDraw:
    """One retained draw: coefficients, spectrum state, and bookkeeping."""

    theta: np.ndarray
    state: DpState
    loglik: float
    accept_flags: dict


def prior_draw(
    config: SamplerConfig, seed, n: Optional[int] = None
) -> DpState:
    """Independent draw of the spectrum state from its prior."""
    L = config.stick_limit if config.stick_limit is not None else default_stick_limit(
        n if n is not None else 256
    )
    rng = np.random.default_rng(seed)
    return _prior_state(config, rng, L)


def _prior_state(config: SamplerConfig, rng: np.random.Generator, L: int) -> DpState:
    sticks = rng.beta(1.0, config.M, size=L)
    sticks = np.clip(sticks, 1e-12, 1.0 - 1e-12)
    locations = rng.random(L)
    logp = config.k_prior_logpmf()
    k = int(rng.choice(np.arange(1, config.k_max + 1), p=np.exp(logp)))
    tau = float(rng.gamma(config.tau_shape, 1.0 / config.tau_rate))
    tau = max(tau, np.finfo(float).tiny)
    return DpState(sticks=sticks, locations=locations, k=k, tau=tau)


class _Workspace:
    """Precomputed frequency layout and Beta tables for one model."""

    def __init__(self, model: WhittleModel, config: SamplerConfig):
        self.model = model
        self.config = config
        self.n = model.n
        self.r = model.design.r
        distinct, expand, mult = fourier_frequencies(model.n)
        self.xgrid = distinct / np.pi
        self.expand = expand
        self.mult = mult.astype(float)
        self.even = model.n % 2 == 0
        self.const = -model.n * math.log(2.0 * math.pi)
        self.xt = model.design.Xtilde
        self.zt = model.Ztilde
        self._tables: dict[int, np.ndarray] = {}
        self._trunc_tables: dict[int, np.ndarray] = {}
        if config.truncation_bounds is not None:
            self.trunc_grid = np.linspace(0.0, 1.0, 512)
        self.m = self.xgrid.shape[0]

    def table(self, k: int) -> np.ndarray:
        tab = self._tables.get(k)
        if tab is None:
            tab = bernstein_table(k, self.xgrid)
            self._tables[k] = tab
        return tab

    def trunc_table(self, k: int) -> np.ndarray:
        tab = self._trunc_tables.get(k)
        if tab is None:
            tab = bernstein_table(k, self.trunc_grid)
            self._trunc_tables[k] = tab
        return tab

    def residual_sums(self, theta: np.ndarray) -> np.ndarray:
        resid = self.zt - self.xt @ theta
        return np.bincount(self.expand, weights=resid * resid, minlength=self.m)

    def trunc_ok(self, p, bins, k, tau) -> bool:
        bounds = self.config.truncation_bounds
        w = tau * np.bincount(bins, weights=p, minlength=k + 1)[1:]
        f = w @ self.trunc_table(k)
        if np.min(f) < bounds.tau0:
            return False
        step = np.pi / (self.trunc_grid.shape[0] - 1)
        lip = np.max(np.abs(f)) + np.max(np.abs(np.diff(f))) / step
        return lip <= bounds.tau1


class _SweepState:
    """Mutable spectrum state plus caches used inside one chain."""

    __slots__ = (
        "sticks", "locations", "k", "tau", "p", "bins", "rows", "g",
        "logg_dot", "quad_dot", "s", "loglik",
    )

    def __init__(self, ws: _Workspace, state: DpState, s: np.ndarray, prior_only: bool):
        self.sticks = state.sticks.copy()
        self.locations = state.locations.copy()
        self.k = state.k
        self.tau = state.tau
        self.s = s
        self.refresh(ws)
        self.loglik = _loglik(ws, self, prior_only)

    def refresh(self, ws: _Workspace) -> None:
        """Recompute all caches from the primitive state."""
        self.p = _stick_weights(self.sticks)
        self.bins = _bin_of(self.locations, self.k)
        self.rows = ws.table(self.k)[self.bins - 1]
        self.g = self.p @ self.rows
        self._sync(ws)

    def _sync(self, ws: _Workspace) -> None:
        gmin = float(self.g.min())
        if gmin > 0.0 and 2.0 * math.pi * self.tau * gmin > SPECTRUM_FLOOR:
            self.logg_dot = float(ws.mult @ np.log(self.g))
            self.quad_dot = float(np.sum(self.s / self.g))
        else:
            self.logg_dot = math.inf
            self.quad_dot = math.inf

    def snapshot(self) -> DpState:
        return DpState(
            sticks=self.sticks.copy(),
            locations=self.locations.copy(),
            k=self.k,
            tau=self.tau,
        )


def _loglik(ws: _Workspace, sw: _SweepState, prior_only: bool) -> float:
    if prior_only:
        return 0.0
    return _loglik_parts(ws, sw.logg_dot, sw.quad_dot, sw.tau)


def _loglik_parts(ws: _Workspace, logg_dot: float, quad_dot: float, tau: float) -> float:
    if not (math.isfinite(logg_dot) and math.isfinite(quad_dot)):
        return -math.inf
    # the quadratic term overflows for prior-scale tau values far below
    # the data scale; that region is simply log-density -inf
    tau = float(tau)
    if quad_dot > 0.0 and math.log(quad_dot) - math.log(4.0 * math.pi * tau) > 709.0:
        return -math.inf
    return (
        ws.const
        - 0.5 * (logg_dot + ws.n * math.log(tau))
        - quad_dot / (4.0 * math.pi * tau)
    )


def _candidate_loglik(ws: _Workspace, g: np.ndarray, s: np.ndarray, tau: float, prior_only: bool):
    """Log-likelihood of a candidate mixture g, plus its cache scalars.

    In prior-only mode no positivity rejection happens: conditioning on
    a positive endpoint would tilt the degree distribution away from
    the prior being checked.
    """
    if prior_only:
        return 0.0, math.inf, math.inf
    gmin = float(g.min())
    if gmin <= 0.0 or 2.0 * math.pi * tau * gmin <= SPECTRUM_FLOOR:
        return -math.inf, math.inf, math.inf
    logg = float(ws.mult @ np.log(g))
    quad = float(np.sum(s / g))
    return _loglik_parts(ws, logg, quad, tau), logg, quad


def gibbs_theta(
    model: WhittleModel,
    state: DpState,
    prior_theta: Optional[GaussianPrior],
    rng: np.random.Generator,
) -> np.ndarray:
    """Exact draw of the coefficients from their Gaussian conditional."""
    ws = _Workspace(model, SamplerConfig())
    sw = _SweepState(ws, state, np.zeros(ws.m), prior_only=True)
    return _draw_theta(ws, sw, prior_theta, rng)


def _draw_theta(
    ws: _Workspace,
    sw: _SweepState,
    prior_theta: Optional[GaussianPrior],
    rng: np.random.Generator,
) -> np.ndarray:
    """Exact conditional draw, computed as weighted least squares via QR.

    The normal-equations route squares the condition number, and designs
    that absorb a Fourier frequency outright (seasonal dummies at 0 and
    pi) let the spectrum collapse there, past what Cholesky survives.
    QR on the weighted design keeps the draw stable in that regime.
    """
    d = 2.0 * math.pi * sw.tau * sw.g[ws.expand]
    if np.any(d <= 0.0):
        raise ChainDivergedError(-1, "spectrum vanished at a Fourier frequency")
    root = np.sqrt(d)
    B = ws.xt / root[:, None]
    y = ws.zt / root
    if prior_theta is not None:
        pc = np.atleast_2d(np.asarray(prior_theta.cov, dtype=float))
        m0 = np.atleast_1d(np.asarray(prior_theta.mean, dtype=float))
        # rows U with U'U = prior precision fold the prior into the
        # same least-squares problem
        upper = np.linalg.cholesky(np.linalg.inv(pc)).T
        B = np.vstack([B, upper])
        y = np.concatenate([y, upper @ m0])
    q, r_mat = np.linalg.qr(B)
    if not np.all(np.isfinite(r_mat)) or np.any(np.diag(r_mat) == 0.0):
        raise ChainDivergedError(-1, "degenerate normal equations")
    mean = sla.solve_triangular(r_mat, q.T @ y, lower=False, check_finite=False)
    noise = sla.solve_triangular(
        r_mat, rng.standard_normal(ws.r), lower=False, check_finite=False
    )
    return mean + noise


@dataclass
class _Scales:
    """Log proposal scales, adapted during burnin only."""

    v: float
    u: float
    tau: float

    @classmethod
    def from_config(cls, config: SamplerConfig) -> "_Scales":
        # zero scale maps to -inf and stays there: the walk degenerates
        # to the identity proposal, which is accepted with ratio 1
        log0 = lambda x: math.log(x) if x > 0.0 else -math.inf
        return cls(
            v=log0(config.v_scale),
            u=log0(config.u_scale),
            tau=log0(config.tau_scale),
        )

    def as_dict(self) -> dict:
        return {"v": self.v, "u": self.u, "tau": self.tau}


_SCALE_BOUNDS = (-10.0, 3.0)


def _sweep(
    ws: _Workspace,
    sw: _SweepState,
    scales: _Scales,
    rng: np.random.Generator,
    prior_only: bool,
) -> dict:
    """One full Metropolis sweep over sticks, locations, degree, scale."""
    cfg = ws.config
    L = sw.sticks.shape[0]
    counts = {"V": 0, "U": 0, "k": 0, "tau": 0}
    trunc = cfg.truncation_bounds is not None

    # stick block: logit-space Gaussian walk.  Changing stick ell scales
    # weight ell by v'/v and every later weight by (1-v')/(1-v), so the
    # candidate mixture comes from a prefix/tail split in O(m).
    v_step = math.exp(scales.v)
    eps = rng.standard_normal(L)
    logu = np.log(rng.random(L))
    mm1 = cfg.M - 1.0
    prefix = np.zeros_like(sw.g)
    for ell in range(L):
        v = sw.sticks[ell]
        dx = v_step * eps[ell]
        if dx == 0.0:
            # identity proposal, accepted with ratio exactly 1; the
            # logit round trip is not bitwise so skip the transform
            counts["V"] += 1
            prefix += sw.p[ell] * sw.rows[ell]
            continue
        x = math.log(v / (1.0 - v)) + dx
        if math.fabs(x) <= 500.0:
            v_new = 1.0 / (1.0 + math.exp(-x))
            if 0.0 < v_new < 1.0:
                prior_jac = (
                    mm1 * (math.log1p(-v_new) - math.log1p(-v))
                    + math.log(v_new * (1.0 - v_new))
                    - math.log(v * (1.0 - v))
                )
                if ell == L - 1:
                    # residual-mass convention: the last stick never
                    # enters the weights, so only the prior moves it
                    if logu[ell] < prior_jac:
                        sw.sticks[ell] = v_new
                        counts["V"] += 1
                else:
                    ratio_v = v_new / v
                    ratio_c = (1.0 - v_new) / (1.0 - v)
                    own = sw.p[ell] * sw.rows[ell]
                    # the true tail is a sum of nonnegative terms; the
                    # subtraction can cancel to tiny negatives
                    tail = np.maximum(sw.g - prefix - own, 0.0)
                    g_new = prefix + ratio_v * own + ratio_c * tail
                    ll_new, logg, quad = _candidate_loglik(
                        ws, g_new, sw.s, sw.tau, prior_only
                    )
                    ok = True
                    if trunc and ll_new > -math.inf:
                        p_cand = sw.p.copy()
                        p_cand[ell] *= ratio_v
                        p_cand[ell + 1 :] *= ratio_c
                        ok = ws.trunc_ok(p_cand, sw.bins, sw.k, sw.tau)
                    if ok and logu[ell] < ll_new - sw.loglik + prior_jac:
                        sw.sticks[ell] = v_new
                        sw.p[ell] *= ratio_v
                        sw.p[ell + 1 :] *= ratio_c
                        sw.g = g_new
                        sw.logg_dot, sw.quad_dot = logg, quad
                        sw.loglik = ll_new
                        counts["V"] += 1
        prefix += sw.p[ell] * sw.rows[ell]

    # location block: reflected uniform-window walk
    u_step = math.exp(scales.u)
    shifts = u_step * (2.0 * rng.random(L) - 1.0)
    logu = np.log(rng.random(L))
    table = ws.table(sw.k)
    for ell in range(L):
        u_new = _reflect(sw.locations[ell] + shifts[ell])
        b_new = min(max(int(math.ceil(u_new * sw.k)), 1), sw.k)
        b_old = sw.bins[ell]
        if b_new == b_old:
            # same bin: spectrum unchanged, accept ratio is 1
            sw.locations[ell] = u_new
            counts["U"] += 1
            continue
        g_new = sw.g + sw.p[ell] * (table[b_new - 1] - table[b_old - 1])
        ll_new, logg, quad = _candidate_loglik(ws, g_new, sw.s, sw.tau, prior_only)
        if trunc and ll_new > -math.inf:
            bins_cand = sw.bins.copy()
            bins_cand[ell] = b_new
            if not ws.trunc_ok(sw.p, bins_cand, sw.k, sw.tau):
                continue
        if logu[ell] < ll_new - sw.loglik:
            sw.locations[ell] = u_new
            sw.bins[ell] = b_new
            sw.rows[ell] = table[b_new - 1]
            sw.g = g_new
            sw.logg_dot, sw.quad_dot = logg, quad
            sw.loglik = ll_new
            counts["U"] += 1

    # degree block: discrete walk with p(k) ratio
    steps = np.asarray(cfg.k_steps, dtype=int)
    step = int(rng.choice(steps)) * (1 if rng.random() < 0.5 else -1)
    k_new = sw.k + step
    logu_k = math.log(rng.random())
    if step == 0:
        counts["k"] += 1
    elif 1 <= k_new <= cfg.k_max:
        bins_new = _bin_of(sw.locations, k_new)
        rows_new = ws.table(k_new)[bins_new - 1]
        g_new = sw.p @ rows_new
        ll_new, logg, quad = _candidate_loglik(ws, g_new, sw.s, sw.tau, prior_only)
        ok = True
        if trunc and ll_new > -math.inf:
            ok = ws.trunc_ok(sw.p, bins_new, k_new, sw.tau)
        if ok:
            log_acc = ll_new - sw.loglik - cfg.k_decay * (k_new * k_new - sw.k * sw.k)
            if logu_k < log_acc:
                sw.k = k_new
                sw.bins = bins_new
                sw.rows = rows_new
                sw.g = g_new
                sw.logg_dot, sw.quad_dot = logg, quad
                sw.loglik = ll_new
                counts["k"] += 1

    # scale block: log walk with Gamma prior ratio (Jacobian absorbed)
    t_step = math.exp(scales.tau)
    tau_new = sw.tau * math.exp(t_step * rng.standard_normal())
    logu_t = math.log(rng.random())
    if tau_new > 0.0 and math.isfinite(tau_new):
        if prior_only:
            ll_new = 0.0
        elif 2.0 * math.pi * tau_new * float(sw.g.min()) <= SPECTRUM_FLOOR:
            ll_new = -math.inf
        else:
            ll_new = _loglik_parts(ws, sw.logg_dot, sw.quad_dot, tau_new)
        ok = True
        if trunc and ll_new > -math.inf:
            ok = ws.trunc_ok(sw.p, sw.bins, sw.k, tau_new)
        if ok:
            log_acc = (
                ll_new
                - sw.loglik
                + cfg.tau_shape * (math.log(tau_new) - math.log(sw.tau))
                - cfg.tau_rate * (tau_new - sw.tau)
            )
            if logu_t < log_acc:
                sw.tau = tau_new
                sw.loglik = ll_new
                counts["tau"] += 1

    return counts


def _reflect(u: float) -> float:
    """Fold a real number into [0, 1] by reflection at the endpoints."""
    u = math.fabs(u) % 2.0
    return 2.0 - u if u > 1.0 else u


def mh_block_f(
    model: WhittleModel,
    theta,
    state: DpState,
    config: SamplerConfig,
    rng: np.random.Generator,
    stats: Optional[dict] = None,
) -> DpState:
    """One Metropolis sweep of the spectrum state at fixed coefficients.

    Uses the configured (un-adapted) proposal scales.  If stats is
    given, per-block acceptance counts are stored into it.
    """
    ws = _Workspace(model, config)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    sw = _SweepState(ws, state, ws.residual_sums(theta), prior_only=False)
    if not math.isfinite(sw.loglik):
        raise ChainDivergedError(0, "initial state has zero spectrum at a frequency")
    counts = _sweep(ws, sw, _Scales.from_config(config), rng, prior_only=False)
    if stats is not None:
        stats.update(counts)
        stats["proposals"] = {
            "V": state.stick_limit, "U": state.stick_limit, "k": 1, "tau": 1,
        }
    return sw.snapshot()


@dataclass(frozen=True)
class ChainSummary:
    """Posterior summaries of coefficients and the spectrum band."""

    level: float
    coef_mean: np.ndarray
    coef_median: np.ndarray
    coef_lower: np.ndarray
    coef_upper: np.ndarray
    coef_length: np.ndarray
    spectrum_grid: np.ndarray
    spectrum_median: np.ndarray
    spectrum_lower: np.ndarray
    spectrum_upper: np.ndarray


@dataclass(frozen=True)
class ChainResult:
    """Retained draws plus acceptance bookkeeping."""

    draws: list
    acceptance: dict
    scales: dict
    stick_limit: int
    seed: int

    def theta_matrix(self) -> np.ndarray:
        return np.array([d.theta for d in self.draws])


def _philox(key: np.ndarray, kind: int, index: int) -> np.random.Generator:
    counter = np.zeros(4, dtype=np.uint64)
    counter[2] = np.uint64(index)
    counter[3] = np.uint64(kind)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


def _chain_key(seed) -> np.ndarray:
    if isinstance(seed, np.random.SeedSequence):
        return seed.generate_state(2, np.uint64)
    return np.random.SeedSequence(int(seed)).generate_state(2, np.uint64)


INIT_STREAM, ITER_STREAM = 1, 0


def run_chain(
    model: WhittleModel,
    config: SamplerConfig,
    prior_only: bool = False,
    resume: Optional[str] = None,
    checkpoint_path: Optional[str] = None,
    checkpoint_every: int = 0,
) -> ChainResult:
    """Run the Metropolis-within-Gibbs chain and return retained draws.

    Iteration i draws the coefficients from their exact conditional and
    then sweeps the spectrum blocks once.  Draws with index >= burnin
    and (index - burnin) divisible by the thinning are retained.  With
    prior_only=True the likelihood term is switched off (the chain then
    targets the prior and coefficients stay at zero).

    A checkpoint file stores everything needed to resume: primitive
    state, adapted scales, iteration index, and the chain key.  Resumed
    runs reproduce the original continuation exactly.
    """
    ws = _Workspace(model, config)
    key = _chain_key(config.seed)
    L = (
        config.stick_limit
        if config.stick_limit is not None
        else default_stick_limit(model.n)
    )
    scales = _Scales.from_config(config)
    start_iter = 0
    counts_total = {"V": 0, "U": 0, "k": 0, "tau": 0}
    proposals_total = dict(counts_total)

    if resume is not None:
        if not isinstance(resume, (str, os.PathLike)):
            raise TypeError("resume expects a checkpoint path")
        with open(resume) as fh:
            snap = json.load(fh)
        if snap.get("version") != CHECKPOINT_VERSION:
            raise ValueError("unsupported checkpoint version")
        if snap["n"] != model.n or snap["stick_limit"] != L:
            raise ValueError("checkpoint does not match this model/config")
        key = np.asarray(snap["key"], dtype=np.uint64)
        state = DpState(
            sticks=np.asarray(snap["sticks"]),
            locations=np.asarray(snap["locations"]),
            k=int(snap["k"]),
            tau=float(snap["tau"]),
        )
        theta = np.asarray(snap["theta"], dtype=float)
        scales = _Scales(**snap["scales"])
        start_iter = int(snap["iteration"])
        counts_total = dict(snap["accept_counts"])
        proposals_total = dict(snap["proposal_counts"])
    else:
        init_rng = _philox(key, INIT_STREAM, 0)
        state, theta = _initial_state(ws, config, init_rng, L, prior_only)

    sw = _SweepState(ws, state, ws.residual_sums(theta), prior_only)
    if not math.isfinite(sw.loglik):
        raise ChainDivergedError(start_iter, "initial spectrum invalid")

    draws: list[PosteriorDraw] = []
    burnin, thin = config.burnin, config.thinning
    L_f = float(L)
    anchor = None
    for it in range(start_iter, config.iterations):
        rng = _philox(key, ITER_STREAM, it)
        # rebuild caches from primitive state so every iteration boundary
        # is a pure function of (state, theta); restarts then agree bitwise
        sw.refresh(ws)
        sw.loglik = _loglik(ws, sw, prior_only)
        if not prior_only and not math.isfinite(sw.loglik):
            # the incrementally updated mixture can sit just above the
            # underflow floor while the rebuilt one lands below it; the
            # sweep that walked there is void, restart the iteration
            # from the last boundary that rebuilt cleanly
            if anchor is None:
                raise ChainDivergedError(it, "initial spectrum invalid")
            state_a, theta = anchor
            sw = _SweepState(ws, state_a, ws.residual_sums(theta), prior_only)
        anchor = (sw.snapshot(), np.array(theta, copy=True))
        if not prior_only:
            theta = _draw_theta(ws, sw, config.theta_prior, rng)
            sw.s = ws.residual_sums(theta)
            sw.quad_dot = float(np.sum(sw.s / sw.g))
            sw.loglik = _loglik(ws, sw, prior_only)
        counts = _sweep(ws, sw, scales, rng, prior_only)
        if not math.isfinite(sw.loglik):
            raise ChainDivergedError(it)
        for block in counts_total:
            counts_total[block] += counts[block]
        proposals_total["V"] += L
        proposals_total["U"] += L
        proposals_total["k"] += 1
        proposals_total["tau"] += 1

        if config.adapt and it < burnin:
            step = (it + 1.0) ** -0.6
            scales.v = _clamp(scales.v + step * (counts["V"] / L_f - config.target_accept))
            scales.u = _clamp(scales.u + step * (counts["U"] / L_f - config.target_accept))
            scales.tau = _clamp(scales.tau + step * (counts["tau"] - config.target_accept))

        if it >= burnin and (it - burnin) % thin == 0:
            draws.append(
                PosteriorDraw(
                    theta=np.array(theta, copy=True),
                    state=sw.snapshot(),
                    loglik=sw.loglik,
                    accept_flags={b: counts[b] > 0 for b in counts},
                )
            )
        if (
            checkpoint_path is not None
            and checkpoint_every > 0
            and (it + 1) % checkpoint_every == 0
        ):
            _write_checkpoint(
                checkpoint_path, ws, sw, theta, scales, it + 1, key,
                counts_total, proposals_total, L,
            )

    acceptance = {
        b: counts_total[b] / proposals_total[b] if proposals_total[b] else 0.0
        for b in counts_total
    }
    logger.info("chain finished: %d retained draws, acceptance %s", len(draws), acceptance)
    return ChainResult(
        draws=draws,
        acceptance=acceptance,
        scales=scales.as_dict(),
        stick_limit=L,
        seed=config.seed if isinstance(config.seed, (int, np.integer)) else -1,
    )


def _clamp(x: float) -> float:
    if x == -math.inf:
        # a degenerate (zero) proposal scale is never adapted away from
        return x
    return min(max(x, _SCALE_BOUNDS[0]), _SCALE_BOUNDS[1])


def _initial_state(
    ws: _Workspace,
    config: SamplerConfig,
    rng: np.random.Generator,
    L: int,
    prior_only: bool,
):
    """Prior state, retried until the spectrum is valid for the data.

    With the likelihood on, the prior scale draw is replaced by the
    profile-optimal scale given the mixture shape; tiny Gamma-prior
    draws would otherwise start the chain hundreds of log-units from
    anything the scale walk can reach quickly.
    """
    theta = np.zeros(ws.r)
    if prior_only:
        return _prior_state(config, rng, L), theta
    s = ws.residual_sums(theta)
    for attempt in range(500):
        state = _prior_state(config, rng, L)
        sw = _SweepState(ws, state, s, prior_only=True)
        if np.all(sw.g > 0.0):
            tau0 = float(np.sum(sw.s / sw.g)) / (2.0 * math.pi * ws.n)
            state = replace(state, tau=max(tau0, np.finfo(float).tiny))
            if attempt:
                logger.debug("initial state found after %d retries", attempt)
            return state, theta
    raise ChainDivergedError(0, "could not find a valid initial spectrum")


def _write_checkpoint(
    path, ws, sw, theta, scales, iteration, key, counts_total, proposals_total, L
) -> None:
    payload = {
        "version": CHECKPOINT_VERSION,
        "iteration": iteration,
        "n": ws.n,
        "stick_limit": L,
        "sticks": sw.sticks.tolist(),
        "locations": sw.locations.tolist(),
        "k": sw.k,
        "tau": sw.tau,
        "theta": np.atleast_1d(theta).tolist(),
        "scales": scales.as_dict(),
        "key": [int(x) for x in key],
        "accept_counts": counts_total,
        "proposal_counts": proposals_total,
    }
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)


def summarize(draws: Sequence[PosteriorDraw], level: float = 0.90) -> ChainSummary:
    """Equal-tailed posterior summaries and a pointwise spectrum band.

    Quantiles are taken at (1-level)/2 and 1-(1-level)/2.  The spectrum
    band is computed on a 128-point grid over [0, pi] by evaluating
    every retained draw, grouping draws by degree.
    """
    if len(draws) < 10:
        raise ValueError("need at least 10 draws to summarize")
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    lo_q, hi_q = (1.0 - level) / 2.0, 1.0 - (1.0 - level) / 2.0
    thetas = np.array([np.atleast_1d(d.theta) for d in draws])
    coef_mean = thetas.mean(axis=0)
    coef_median = np.quantile(thetas, 0.5, axis=0)
    coef_lower = np.quantile(thetas, lo_q, axis=0)
    coef_upper = np.quantile(thetas, hi_q, axis=0)

    grid = np.linspace(0.0, np.pi, 128)
    xgrid = grid / np.pi
    fvals = np.empty((len(draws), grid.shape[0]))
    by_k: dict[int, list[int]] = {}
    for i, d in enumerate(draws):
        by_k.setdefault(d.state.k, []).append(i)
    for k, idxs in by_k.items():
        table = bernstein_table(k, xgrid)
        weights = np.array([draws[i].state.bernstein_weights() for i in idxs])
        fvals[idxs] = weights @ table
    return ChainSummary(
        level=level,
        coef_mean=coef_mean,
        coef_median=coef_median,
        coef_lower=coef_lower,
        coef_upper=coef_upper,
        coef_length=coef_upper - coef_lower,
        spectrum_grid=grid,
        spectrum_median=np.quantile(fvals, 0.5, axis=0),
        spectrum_lower=np.quantile(fvals, lo_q, axis=0),
        spectrum_upper=np.quantile(fvals, hi_q, axis=0),
    )
