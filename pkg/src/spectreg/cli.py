"""Command-line entry points.

    spectreg study run <config.ini> [--seed S] [--json OUT] [--csv OUT]
    spectreg fit <data.csv> [--design trend_seasonal] [--log] [--out OUT]
    spectreg plotdata <fit.json> <out.csv>
    spectreg asymptotics report|counterexample|circulant [options]
    spectreg distances audit [options]

Study configs are INI files with a [study] section and an optional
[sampler] section:

    [study]
    scenario = mean_ar1        ; mean_ar1 | linreg_ar1
    rho = 0.7
    sigma2 = 1.0
    mu = 0.0
    beta = 0.0 1.0             ; linreg_ar1 truth
    n_list = 128 256
    replicates = 200
    fits = NP AR WN
    level = 0.90
    seed = 0

    [sampler]
    iterations = 6000
    burnin = 2000
    thinning = 2
    k_max = 500
    seed = 0

Worker-pool size for studies comes from the SPECTREG_WORKERS
environment variable (default 1).
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
from pathlib import Path

from .asymptotics import (
    ar1_circulant_identity,
    counterexample_scan,
    covariance_report,
    write_csv,
    write_json,
)
from .distances import hellinger_lower_audit, kn_bound_audit
from .fourier import make_design
from .sampler import SamplerConfig
from .spectra import Ar1Spec, ar1_covariance
from .study import (
    StudyConfig,
    emit_plotdata,
    fit_dataset,
    load_fit_report,
    run_study,
)

__all__ = ["main", "build_parser", "load_study_config"]

_SAMPLER_INT_KEYS = ("iterations", "burnin", "thinning", "k_max", "stick_limit", "seed")
_SAMPLER_FLOAT_KEYS = (
    "M", "k_decay", "tau_shape", "tau_rate", "v_scale", "u_scale",
    "tau_scale", "target_accept",
)


def load_study_config(path, seed_override=None) -> StudyConfig:
    """Parse an INI study config; unknown keys are rejected."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise ValueError(f"cannot read config file {path}")
    if "study" not in parser:
        raise ValueError("config file needs a [study] section")
    study = parser["study"]

    sampler_kwargs = {}
    if "sampler" in parser:
        for key, raw in parser["sampler"].items():
            if key in _SAMPLER_INT_KEYS:
                sampler_kwargs[key] = int(raw)
            elif key in _SAMPLER_FLOAT_KEYS:
                sampler_kwargs[key] = float(raw)
            elif key == "adapt":
                sampler_kwargs[key] = parser["sampler"].getboolean(key)
            else:
                raise ValueError(f"unknown [sampler] key {key!r}")

    known = {
        "scenario", "rho", "sigma2", "mu", "beta", "n_list",
        "replicates", "fits", "level", "seed",
    }
    unknown = set(study.keys()) - known
    if unknown:
        raise ValueError(f"unknown [study] keys {sorted(unknown)}")

    kwargs = {
        "scenario": study.get("scenario", "mean_ar1"),
        "rho": study.getfloat("rho", 0.0),
        "sigma2": study.getfloat("sigma2", 1.0),
        "mu": study.getfloat("mu", 0.0),
        "replicates": study.getint("replicates", 200),
        "level": study.getfloat("level", 0.90),
        "seed": study.getint("seed", 0),
    }
    if "beta" in study:
        kwargs["beta"] = tuple(float(v) for v in study.get("beta").split())
    if "n_list" in study:
        kwargs["n_list"] = tuple(int(v) for v in study.get("n_list").split())
    if "fits" in study:
        kwargs["error_model_fits"] = tuple(study.get("fits").split())
    if seed_override is not None:
        kwargs["seed"] = seed_override
    if sampler_kwargs:
        kwargs["sampler"] = SamplerConfig(**sampler_kwargs)
    return StudyConfig(**kwargs)


def _cmd_study(args) -> int:
    if args.action != "run":
        raise SystemExit(f"unknown study action {args.action!r}")
    config = load_study_config(args.config, seed_override=args.seed)
    result = run_study(config)
    stem = Path(args.config).with_suffix("")
    json_path = args.json if args.json else f"{stem}_results.json"
    csv_path = args.csv if args.csv else f"{stem}_results.csv"
    result.write_json(json_path)
    result.write_csv(csv_path)
    print(f"{'label':<14}{'n':>6}{'post_mean':>12}{'mse':>10}{'coverage':>10}{'length':>9}")
    for row in result.rows:
        print(
            f"{row.label:<14}{row.n:>6}{row.post_mean:>12.4f}"
            f"{row.mse:>10.4f}{row.coverage:>10.4f}{row.length:>9.4f}"
        )
    if result.failures:
        print(f"excluded {len(result.failures)} failed replicates", file=sys.stderr)
    print(f"wrote {json_path} and {csv_path}")
    return 0


def _cmd_fit(args) -> int:
    sampler = None
    if args.iterations is not None:
        burnin = args.burnin if args.burnin is not None else min(2000, args.iterations // 3)
        sampler = SamplerConfig(
            iterations=args.iterations, burnin=burnin, thinning=args.thinning,
            seed=args.seed,
        )
    report = fit_dataset(
        args.csv,
        design=args.design,
        sampler=sampler,
        log=args.log,
        value_column=args.value_column,
        period=args.period,
        level=args.level,
        seed=args.seed,
    )
    out = args.out if args.out else f"{Path(args.csv).with_suffix('')}_fit.json"
    report.write_json(out)
    for j, name in enumerate(report.coef_names):
        print(
            f"{name:<10} mean {report.coef_mean[j]:>9.4f}   "
            f"{report.level:.0%} interval "
            f"[{report.coef_lower[j]:.4f}, {report.coef_upper[j]:.4f}]"
        )
    print(
        f"observed in band: {report.observed_in_band_fraction():.1%}; wrote {out}"
    )
    return 0


def _cmd_plotdata(args) -> int:
    report = load_fit_report(args.fit)
    emit_plotdata(report, args.out)
    print(f"wrote {args.out} ({report.n} rows)")
    return 0


def _cmd_asymptotics(args) -> int:
    if args.action == "report":
        rows = []
        f0 = Ar1Spec(args.alpha, args.sigma2)
        for n in args.n:
            design = make_design(args.design, n)
            sigma = ar1_covariance(f0, n)
            rows.append(covariance_report(design, f0, sigma).as_dict())
        payload = {
            "alpha": args.alpha, "sigma2": args.sigma2,
            "design": args.design, "rows": rows,
        }
        fields = sorted(rows[0]) if rows else []
    elif args.action == "counterexample":
        points = counterexample_scan(args.alpha, n_list=tuple(args.n))
        rows = [p.as_dict() for p in points]
        limit = 2.0 * args.alpha**2 / (1.0 - args.alpha**2)
        payload = {"alpha": args.alpha, "limit": limit, "rows": rows}
        fields = sorted(rows[0])
    elif args.action == "circulant":
        rows = []
        for n in args.n:
            lhs, corner, err = ar1_circulant_identity(args.alpha, n)
            rows.append({"n": n, "max_error": err})
        payload = {"alpha": args.alpha, "rows": rows}
        fields = ["n", "max_error"]
    else:
        raise SystemExit(f"unknown asymptotics action {args.action!r}")
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.json:
        write_json(args.json, payload)
    if args.csv:
        write_csv(args.csv, rows, fields)
    return 0


def _cmd_distances(args) -> int:
    if args.action != "audit":
        raise SystemExit(f"unknown distances action {args.action!r}")
    payload = {
        "kn_bound": kn_bound_audit(
            n_values=tuple(args.n), instances=args.instances, seed=args.seed
        ),
        "hellinger_lower": hellinger_lower_audit(
            n_values=tuple(args.n), instances=args.instances, seed=args.seed + 1
        ),
    }
    print(json.dumps(payload, indent=2, sort_keys=True, default=float))
    if args.json:
        write_json(args.json, payload)
    return 0


def _int_list(raw: str) -> int:
    return int(raw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectreg",
        description="Spectral-prior regression studies, fits, and numeric audits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_study = sub.add_parser("study", help="run a simulation study from a config file")
    p_study.add_argument("action", choices=["run"])
    p_study.add_argument("config", help="INI config file")
    p_study.add_argument("--seed", type=int, default=None, help="override config seed")
    p_study.add_argument("--json", default=None, help="results JSON path")
    p_study.add_argument("--csv", default=None, help="results CSV path")
    p_study.set_defaults(func=_cmd_study)

    p_fit = sub.add_parser("fit", help="fit one CSV series")
    p_fit.add_argument("csv")
    p_fit.add_argument(
        "--design", default="trend_seasonal",
        choices=["trend_seasonal", "linear_trend", "mean"],
    )
    p_fit.add_argument("--log", action="store_true", help="log-transform the series")
    p_fit.add_argument("--value-column", default="value")
    p_fit.add_argument("--period", type=int, default=12)
    p_fit.add_argument("--level", type=float, default=0.90)
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--iterations", type=int, default=None)
    p_fit.add_argument("--burnin", type=int, default=None)
    p_fit.add_argument("--thinning", type=int, default=2)
    p_fit.add_argument("--out", default=None, help="fit report JSON path")
    p_fit.set_defaults(func=_cmd_fit)

    p_plot = sub.add_parser("plotdata", help="emit plot CSV from a fit report")
    p_plot.add_argument("fit", help="fit report JSON")
    p_plot.add_argument("out", help="output CSV path")
    p_plot.set_defaults(func=_cmd_plotdata)

    p_asym = sub.add_parser("asymptotics", help="covariance and identity audits")
    p_asym.add_argument("action", choices=["report", "counterexample", "circulant"])
    p_asym.add_argument("--alpha", type=float, default=0.7)
    p_asym.add_argument("--sigma2", type=float, default=1.0)
    p_asym.add_argument("--design", default="mean", choices=["mean", "linear_trend"])
    p_asym.add_argument(
        "--n", type=_int_list, nargs="+", default=[128, 256, 512, 1024, 2048]
    )
    p_asym.add_argument("--json", default=None)
    p_asym.add_argument("--csv", default=None)
    p_asym.set_defaults(func=_cmd_asymptotics)

    p_dist = sub.add_parser("distances", help="distance-identity audits")
    p_dist.add_argument("action", choices=["audit"])
    p_dist.add_argument("--n", type=_int_list, nargs="+", default=[16, 32, 64, 128])
    p_dist.add_argument("--instances", type=int, default=100)
    p_dist.add_argument("--seed", type=int, default=0)
    p_dist.add_argument("--json", default=None)
    p_dist.set_defaults(func=_cmd_distances)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
