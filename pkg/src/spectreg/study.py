"""Simulation studies, dataset fits, and plot-data persistence.

run_study simulates regressions with autoregressive errors and compares
interval behaviour across three error-model fits (free spectrum,
parametric AR(1), white noise).  fit_dataset runs the seasonal
case-study pipeline on a CSV file.  Both emit plain JSON/CSV so results
can be archived and plotted elsewhere.
"""
from __future__ import annotations

import csv
import json
import logging
import os
import warnings
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .estimators import (
    WhiteNoiseRegression,
    WhittleAr1Regression,
    WhittleBdpRegression,
)
from .fourier import make_design
from .sampler import SamplerConfig, summarize
from .spectra import Ar1Spec, simulate_ts

__all__ = [
    "StudyConfig",
    "StudyRow",
    "StudyResult",
    "FitReport",
    "run_study",
    "fit_dataset",
    "emit_plotdata",
    "load_fit_report",
]

logger = logging.getLogger(__name__)

_SCENARIOS = ("mean_ar1", "linreg_ar1", "custom")
_FITS = ("NP", "AR", "WN")

WORKERS_ENV = "SPECTREG_WORKERS"
MAX_FAILURE_FRACTION = 0.05


@dataclass(frozen=True)
class StudyConfig:
    """Scenario, truth, and fitting choices for one simulation study."""

    scenario: str = "mean_ar1"
    rho: float = 0.0
    sigma2: float = 1.0
    mu: float = 0.0
    beta: Sequence[float] = (0.0, 1.0)
    n_list: Sequence[int] = (128,)
    replicates: int = 200
    error_model_fits: Sequence[str] = _FITS
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    level: float = 0.90
    seed: int = 0
    design_matrix: Optional[np.ndarray] = None
    theta_true: Optional[Sequence[float]] = None

    def __post_init__(self):
        if self.scenario not in _SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if len(self.n_list) == 0:
            raise ValueError("n_list must be nonempty")
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must be in (0, 1)")
        if not -1.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (-1, 1)")
        if self.sigma2 <= 0.0:
            raise ValueError("sigma2 must be positive")
        bad = [f for f in self.error_model_fits if f not in _FITS]
        if bad or len(self.error_model_fits) == 0:
            raise ValueError(f"error_model_fits must be a nonempty subset of {_FITS}")
        if self.scenario == "custom":
            if self.design_matrix is None or self.theta_true is None:
                raise ValueError("custom scenario needs design_matrix and theta_true")

    def truth(self) -> np.ndarray:
        if self.scenario == "mean_ar1":
            return np.array([self.mu])
        if self.scenario == "linreg_ar1":
            return np.asarray(self.beta, dtype=float)
        return np.asarray(self.theta_true, dtype=float)

    def coef_names(self) -> list:
        if self.scenario == "mean_ar1":
            return ["mu"]
        if self.scenario == "linreg_ar1":
            return [f"beta{j}" for j in range(len(self.beta))]
        return [f"c{j}" for j in range(len(self.theta_true))]

    def design_kind(self) -> str:
        return {"mean_ar1": "mean", "linreg_ar1": "linear_trend", "custom": "custom"}[
            self.scenario
        ]


@dataclass(frozen=True)
class StudyRow:
    """One aggregated table row: a fit label and its interval behaviour."""

    label: str
    n: int
    post_mean: float
    mse: float
    coverage: float
    length: float

    def __post_init__(self):
        if not 0.0 <= self.coverage <= 1.0:
            raise ValueError("coverage must lie in [0, 1]")
        if self.mse < 0.0 or self.length < 0.0:
            raise ValueError("mse and length must be nonnegative")

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "n": self.n,
            "post_mean": self.post_mean,
            "mse": self.mse,
            "coverage": self.coverage,
            "length": self.length,
        }


@dataclass(frozen=True)
class StudyResult:
    """Aggregated rows plus the per-replicate records behind them."""

    rows: list
    records: list
    failures: list
    config: StudyConfig

    def row(self, label: str, n: int) -> StudyRow:
        for r in self.rows:
            if r.label == label and r.n == n:
                return r
        raise KeyError(f"no row {label!r} at n={n}")

    def coverage(self, fit: str, n: int, coef: int = 0) -> float:
        names = self.config.coef_names()
        return self.row(f"{fit}:{names[coef]}", n).coverage

    def to_payload(self) -> dict:
        return {
            "config": _jsonable(asdict(self.config)),
            "rows": [r.as_dict() for r in self.rows],
            "replicates": _jsonable(self.records),
            "failures": _jsonable(self.failures),
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_payload(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["label", "n", "post_mean", "mse", "coverage", "length"])
            for r in self.rows:
                writer.writerow(
                    [r.label, r.n, repr(r.post_mean), repr(r.mse), repr(r.coverage), repr(r.length)]
                )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def _replicate_seeds(config: StudyConfig, n: int, rep: int):
    root = np.random.SeedSequence(entropy=(config.seed, n, rep))
    return root.spawn(3)


def _simulate(config: StudyConfig, n: int, seed) -> np.ndarray:
    err = simulate_ts(Ar1Spec(config.rho, config.sigma2), n, seed=seed)
    if config.scenario == "mean_ar1":
        return config.mu + err
    if config.scenario == "linreg_ar1":
        t = np.arange(1, n + 1) / n
        beta = np.asarray(config.beta, dtype=float)
        return beta[0] + beta[1] * t + err
    X = np.asarray(config.design_matrix, dtype=float)
    return X @ np.asarray(config.theta_true, dtype=float) + err


def _one_replicate(config: StudyConfig, n: int, rep: int) -> dict:
    sim_seed, np_seed, ar_seed = _replicate_seeds(config, n, rep)
    y = _simulate(config, n, sim_seed)
    kind = config.design_kind()
    X = None
    if config.scenario == "custom":
        X = np.asarray(config.design_matrix, dtype=float)
    fits = {}
    for fit in config.error_model_fits:
        if fit == "NP":
            est = WhittleBdpRegression(
                design=kind,
                level=config.level,
                config=replace(config.sampler, seed=np_seed),
            ).fit(X, y)
            sd = est.chain_.theta_matrix().std(axis=0, ddof=1)
        elif fit == "AR":
            est = WhittleAr1Regression(design=kind, level=config.level, seed=ar_seed).fit(X, y)
            sd = est.theta_draws_.std(axis=0, ddof=1)
        else:
            est = WhiteNoiseRegression(design=kind, level=config.level).fit(X, y)
            sd = est.coef_se_
        intervals = est.coef_intervals()
        fits[fit] = {
            "post_mean": np.atleast_1d(est.coef_).tolist(),
            "post_sd": np.atleast_1d(sd).tolist(),
            "lower": intervals[:, 0].tolist(),
            "upper": intervals[:, 1].tolist(),
        }
    return {"n": n, "replicate": rep, "fits": fits}


def _replicate_task(args):
    # exceptions come back as values so one bad replicate cannot kill a
    # worker-pool map
    try:
        return _one_replicate(*args), None
    except Exception as exc:  # noqa: BLE001 - replicate isolation
        return None, repr(exc)


def run_study(config: StudyConfig) -> StudyResult:
    """Run all replicates, aggregate, and return the result table.

    Replicates are independent: each derives its randomness from
    (seed, n, replicate index), so results do not depend on worker
    count or completion order.  Failing replicates are dropped with a
    logged warning; more than 5% failures aborts the study.
    """
    tasks = [(config, n, rep) for n in config.n_list for rep in range(config.replicates)]
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_replicate_task, tasks, chunksize=1))
    else:
        outcomes = [_replicate_task(task) for task in tasks]

    records, failures = [], []
    for (_, n, rep), (result, error) in zip(tasks, outcomes):
        if result is None:
            logger.warning("replicate (n=%d, rep=%d) failed: %s", n, rep, error)
            failures.append({"n": n, "replicate": rep, "error": error})
        else:
            records.append(result)
    if len(failures) > MAX_FAILURE_FRACTION * len(tasks):
        raise RuntimeError(
            f"{len(failures)} of {len(tasks)} replicates failed; aborting study"
        )
    records.sort(key=lambda r: (r["n"], r["replicate"]))

    truth = config.truth()
    names = config.coef_names()
    rows = []
    for n in config.n_list:
        at_n = [r for r in records if r["n"] == n]
        for fit in config.error_model_fits:
            for j, name in enumerate(names):
                means = np.array([r["fits"][fit]["post_mean"][j] for r in at_n])
                lowers = np.array([r["fits"][fit]["lower"][j] for r in at_n])
                uppers = np.array([r["fits"][fit]["upper"][j] for r in at_n])
                covered = (lowers <= truth[j]) & (truth[j] <= uppers)
                rows.append(
                    StudyRow(
                        label=f"{fit}:{name}",
                        n=n,
                        post_mean=float(means.mean()),
                        mse=float(np.mean((means - truth[j]) ** 2)),
                        coverage=float(covered.mean()),
                        length=float(np.mean(uppers - lowers)),
                    )
                )
    rows.sort(key=lambda r: (r.n, r.label))
    return StudyResult(rows=rows, records=records, failures=failures, config=config)


@dataclass(frozen=True)
class FitReport:
    """Posterior summary of one dataset fit, with per-time-point bands."""

    t: np.ndarray
    observed: np.ndarray
    fitted_median: np.ndarray
    fitted_lower: np.ndarray
    fitted_upper: np.ndarray
    coef_names: list
    coef_mean: np.ndarray
    coef_median: np.ndarray
    coef_lower: np.ndarray
    coef_upper: np.ndarray
    spectrum_grid: np.ndarray
    spectrum_median: np.ndarray
    spectrum_lower: np.ndarray
    spectrum_upper: np.ndarray
    level: float
    log_applied: bool
    n_dropped: int
    acceptance: dict

    @property
    def n(self) -> int:
        return self.t.shape[0]

    def band_ordered(self) -> bool:
        return bool(
            np.all(self.fitted_lower <= self.fitted_median)
            and np.all(self.fitted_median <= self.fitted_upper)
        )

    def median_in_band_fraction(self) -> float:
        """Fraction of time points where the fitted median sits inside the band."""
        inside = (self.fitted_lower <= self.fitted_median) & (
            self.fitted_median <= self.fitted_upper
        )
        return float(inside.mean())

    def observed_in_band_fraction(self) -> float:
        """Fraction of time points where the observed series sits inside the band."""
        inside = (self.fitted_lower <= self.observed) & (
            self.observed <= self.fitted_upper
        )
        return float(inside.mean())

    def coef_interval(self, name: str) -> tuple:
        j = self.coef_names.index(name)
        return float(self.coef_lower[j]), float(self.coef_upper[j])

    def to_payload(self) -> dict:
        payload = {k: _jsonable(v) for k, v in self.__dict__.items()}
        return payload

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_payload(), fh, indent=2, sort_keys=True)
            fh.write("\n")


_FIT_REPORT_ARRAYS = (
    "t", "observed", "fitted_median", "fitted_lower", "fitted_upper",
    "coef_mean", "coef_median", "coef_lower", "coef_upper",
    "spectrum_grid", "spectrum_median", "spectrum_lower", "spectrum_upper",
)


def load_fit_report(path) -> FitReport:
    """Read back a fit report written by FitReport.write_json."""
    with open(path) as fh:
        payload = json.load(fh)
    kwargs = dict(payload)
    for name in _FIT_REPORT_ARRAYS:
        kwargs[name] = np.asarray(payload[name], dtype=float)
    kwargs["t"] = kwargs["t"].astype(int)
    return FitReport(**kwargs)


def _read_value_column(csv_path, value_column: str) -> np.ndarray:
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty CSV") from None
        header = [h.strip() for h in header]
        if value_column not in header:
            raise ValueError(
                f"CSV is missing a {value_column!r} column; found {header}"
            )
        col = header.index(value_column)
        values = []
        for i, row in enumerate(reader, start=2):
            if len(row) <= col:
                raise ValueError(f"row {i} has no {value_column!r} field")
            try:
                values.append(float(row[col]))
            except ValueError:
                raise ValueError(
                    f"row {i}: {row[col]!r} is not numeric"
                ) from None
    if not values:
        raise ValueError("CSV has a header but no data rows")
    return np.asarray(values)


def _seasonal_fit_design(n: int, period: int):
    """Standardized time plus one indicator per season, no intercept."""
    t = np.arange(1, n + 1)
    trend = (t / n)[:, None]
    dummies = np.zeros((n, period))
    dummies[np.arange(n), np.arange(n) % period] = 1.0
    X = np.hstack([trend, dummies])
    names = ["trend"] + [f"season{m + 1:02d}" for m in range(period)]
    return make_design("custom", n, X=X), names


def fit_dataset(
    csv_path,
    design: str = "trend_seasonal",
    sampler: Optional[SamplerConfig] = None,
    log: bool = False,
    value_column: str = "value",
    period: int = 12,
    level: float = 0.90,
    seed: int = 0,
) -> FitReport:
    """Fit one observed series and return coefficient and band summaries.

    The default design is the seasonal case study: standardized time
    plus one 0-1 indicator per month and no intercept.  The series is
    truncated to a whole number of periods (with a warning) so every
    season appears equally often.  With log=True the series is
    log-transformed before fitting and all outputs stay on the log
    scale.
    """
    values = _read_value_column(csv_path, value_column)
    n = values.size
    dropped = 0
    if design == "trend_seasonal":
        if n < 2 * period:
            raise ValueError(f"need at least {2 * period} rows for a seasonal design")
        dropped = n % period
        if dropped:
            warnings.warn(
                f"dropping {dropped} trailing rows to complete whole periods",
                stacklevel=2,
            )
            values = values[: n - dropped]
            n = values.size
    if log:
        if np.any(values <= 0.0):
            raise ValueError("log transform requires positive values")
        y = np.log(values)
    else:
        y = values.astype(float)

    if design == "trend_seasonal":
        design_spec, names = _seasonal_fit_design(n, period)
    elif design in ("mean", "linear_trend"):
        design_spec = make_design(design, n)
        names = ["intercept"] if design == "mean" else ["intercept", "trend"]
    else:
        raise ValueError(f"unknown design kind {design!r}")

    if sampler is None:
        # 6000 retained draws with the default burnin/thinning split
        sampler = SamplerConfig(iterations=14000, burnin=2000, thinning=2, seed=seed)

    from .sampler import run_chain
    from .whittle import WhittleModel

    model = WhittleModel.from_data(y, design_spec)
    chain = run_chain(model, sampler)
    summary = summarize(chain.draws, level=level)

    thetas = chain.theta_matrix()
    fitted = thetas @ design_spec.X.T
    lo_q, hi_q = (1.0 - level) / 2.0, 1.0 - (1.0 - level) / 2.0
    return FitReport(
        t=np.arange(1, n + 1),
        observed=y,
        fitted_median=np.quantile(fitted, 0.5, axis=0),
        fitted_lower=np.quantile(fitted, lo_q, axis=0),
        fitted_upper=np.quantile(fitted, hi_q, axis=0),
        coef_names=names,
        coef_mean=summary.coef_mean,
        coef_median=summary.coef_median,
        coef_lower=summary.coef_lower,
        coef_upper=summary.coef_upper,
        spectrum_grid=summary.spectrum_grid,
        spectrum_median=summary.spectrum_median,
        spectrum_lower=summary.spectrum_lower,
        spectrum_upper=summary.spectrum_upper,
        level=level,
        log_applied=log,
        n_dropped=dropped,
        acceptance=chain.acceptance,
    )


def emit_plotdata(report: FitReport, path) -> None:
    """Write the per-time-point band as a 5-column CSV.

    Columns are (t, observed, median, lower, upper); floats are written
    at full precision so reading the file back reproduces the band.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "observed", "median", "lower", "upper"])
        for i in range(report.n):
            writer.writerow(
                [
                    int(report.t[i]),
                    repr(float(report.observed[i])),
                    repr(float(report.fitted_median[i])),
                    repr(float(report.fitted_lower[i])),
                    repr(float(report.fitted_upper[i])),
                ]
            )
