"""Tests for the covariance comparisons, circulant identity, and scans.

Dense matrix arithmetic (never the closed forms under test) serves as
the oracle throughout.
"""
import csv
import json
import math

import numpy as np
import pytest

from spectreg import (
    Ar1Spec,
    WhittleModel,
    ar1_circulant_identity,
    ar1_covariance,
    build_dft_matrix,
    build_freq_cov,
    bvm_diagnostic,
    conditional_theta_posterior,
    counterexample_scan,
    covariance_report,
    make_design,
    noether_ratio,
    simulate_ts,
)
from spectreg.asymptotics import _spiked_design, write_csv, write_json

TWO_PI = 2.0 * math.pi


class TestCirculantIdentity:
    @pytest.mark.parametrize("alpha", [0.3, -0.3, 0.7, -0.7, 0.9, -0.9])
    @pytest.mark.parametrize("n", [8, 64, 256])
    def test_corner_identity(self, alpha, n):
        _, _, max_error = ar1_circulant_identity(alpha, n)
        assert max_error < 1e-8

    def test_white_noise_case(self):
        lhs, corner, max_error = ar1_circulant_identity(0.0, 16)
        np.testing.assert_allclose(corner, np.zeros((16, 16)), atol=0)
        np.testing.assert_allclose(lhs, np.eye(16), atol=1e-10)
        assert max_error < 1e-10

    def test_tridiagonal_plus_corner_structure(self):
        alpha, n = 0.7, 32
        lhs, _, _ = ar1_circulant_identity(alpha, n)
        i, j = np.indices((n, n))
        gap = np.abs(i - j)
        assert np.abs(lhs[gap == 0] - (1.0 + alpha * alpha)).max() < 1e-8
        assert np.abs(lhs[gap == 1] + alpha).max() < 1e-8
        assert np.abs(lhs[gap == n - 1] + alpha).max() < 1e-8
        far = (gap != 0) & (gap != 1) & (gap != n - 1)
        assert np.abs(lhs[far]).max() < 1e-10

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            ar1_circulant_identity(1.0, 16)
        with pytest.raises(ValueError):
            ar1_circulant_identity(0.5, 3)


class TestCounterexampleScan:
    def test_dual_paths_agree(self):
        pts = counterexample_scan(0.7, n_list=(128,))
        assert pts[0].path_gap < 1e-8

    def test_spiked_design_converges_to_limit(self):
        alpha = 0.7
        limit = 2.0 * alpha * alpha / (1.0 - alpha * alpha)
        pts = counterexample_scan(alpha)
        gaps = [abs(p.value - limit) for p in pts if p.n >= 256]
        for prev, nxt in zip(gaps, gaps[1:]):
            assert nxt <= prev + 1e-6

    def test_all_ones_design_vanishes(self):
        alpha = 0.7
        pts = counterexample_scan(
            alpha, design_rule=np.ones, n_list=(512, 1024, 2048, 4096)
        )
        # corner formula with x1 = xn = 1: n * value -> -2a(1-a)^2/(1-a^2)
        scaled_limit = -2.0 * alpha * (1.0 - alpha) ** 2 / (1.0 - alpha * alpha)
        for p in pts:
            assert abs(p.value) < 1e-2
            assert abs(p.value * p.n) < 1.0
        assert abs(pts[-1].value * pts[-1].n - scaled_limit) < 1e-6

    def test_validation(self):
        with pytest.raises(ValueError):
            counterexample_scan(1.2)
        with pytest.raises(ValueError):
            counterexample_scan(0.5, design_rule=lambda n: np.ones(n + 1), n_list=(16,))

    def test_scan_point_serialization(self):
        p = counterexample_scan(0.5, n_list=(64,))[0]
        d = p.as_dict()
        assert d["n"] == 64
        assert d["value"] == p.closed_form
        assert d["path_gap"] >= 0.0


class TestCovarianceReport:
    def test_white_noise_truth_exact_match(self):
        sigma2 = 1.7
        design = make_design("linear_trend", 32)
        rep = covariance_report(
            design, lambda w: np.full_like(w, sigma2 / TWO_PI), sigma2 * np.eye(32)
        )
        np.testing.assert_allclose(rep.V_0, rep.V_W, atol=1e-12)
        assert rep.discrepancy < 1e-10

    def test_mean_design_posterior_variance(self):
        # the transform of the ones column touches only frequency zero
        n = 256
        f0 = Ar1Spec(0.6, 1.0)
        rep = covariance_report(make_design("mean", n), f0, ar1_covariance(f0, n))
        assert abs(n * rep.V_W[0, 0] - TWO_PI * f0(np.array([0.0]))[0]) < 1e-10

    def test_mean_design_sampling_variance(self):
        n = 2048
        f0 = Ar1Spec(0.7, 1.0)
        rep = covariance_report(make_design("mean", n), f0, ar1_covariance(f0, n))
        # exact finite-n variance of the sample mean
        gam = 0.7 ** np.arange(n) / 0.51
        exact = gam[0] + 2.0 * np.sum((1.0 - np.arange(1, n) / n) * gam[1:])
        assert abs(n * rep.V_0[0, 0] - exact) < 1e-8
        target = TWO_PI * f0(np.array([0.0]))[0]
        assert abs(n * rep.V_0[0, 0] - target) / target < 0.02

    @pytest.mark.parametrize("n", [8, 16, 32])
    def test_zero_discrepancy_for_frequency_consistent_truth(self, n):
        rng = np.random.default_rng(n)
        design = make_design("custom", n, X=rng.standard_normal((n, 2)))
        f0 = Ar1Spec(0.5, 1.0)
        F = build_dft_matrix(n).rows
        d0 = build_freq_cov(f0, n).diag
        Sigma = F.T @ (F * d0[:, None])
        rep = covariance_report(design, f0, Sigma)
        assert rep.discrepancy < 1e-10

    def test_vw_matches_conditional_posterior(self):
        n = 48
        design = make_design("linear_trend", n)
        f0 = Ar1Spec(0.4, 1.0)
        z = simulate_ts(Ar1Spec(0.4, 1.0), n, seed=2)
        model = WhittleModel.from_data(z, design)
        post = conditional_theta_posterior(model, f0)
        rep = covariance_report(design, f0, ar1_covariance(f0, n))
        np.testing.assert_allclose(rep.V_W, post.cov, atol=1e-12)

    def test_dense_oracle(self):
        # V_0 against the fully dense mean-map computation
        n = 64
        design = make_design("linear_trend", n)
        f0 = Ar1Spec(0.7, 1.0)
        Sigma = ar1_covariance(f0, n)
        rep = covariance_report(design, f0, Sigma)
        F = build_dft_matrix(n).rows
        d0 = build_freq_cov(f0, n).diag
        M = rep.V_W @ design.Xtilde.T @ np.diag(1.0 / d0) @ F
        np.testing.assert_allclose(M @ Sigma @ M.T, rep.V_0, atol=1e-10)

    @pytest.mark.parametrize("kind", ["mean", "linear_trend"])
    def test_discrepancy_decays_for_regular_designs(self, kind):
        f0 = Ar1Spec(0.7, 1.0)
        vals = [
            covariance_report(make_design(kind, n), f0, ar1_covariance(f0, n)).discrepancy
            for n in (128, 512, 2048)
        ]
        assert vals[0] > vals[1] > vals[2]

    def test_discrepancy_persists_for_spiked_design(self):
        n = 2048
        f0 = Ar1Spec(0.7, 1.0)
        design = make_design("custom", n, X=_spiked_design(n)[:, None])
        rep = covariance_report(design, f0, ar1_covariance(f0, n))
        assert rep.discrepancy > 0.5

    def test_shape_validation(self):
        design = make_design("mean", 16)
        with pytest.raises(ValueError):
            covariance_report(design, Ar1Spec(0.3, 1.0), np.eye(8))


class TestNoetherRatio:
    def test_all_ones(self):
        assert abs(noether_ratio(make_design("mean", 100)) - 0.01) < 1e-14

    def test_spiked_counterexample_design(self):
        design = make_design("custom", 100, X=_spiked_design(100)[:, None])
        assert abs(noether_ratio(design) - 121.0 / 220.0) < 1e-12

    def test_linear_trend_without_intercept(self):
        design = make_design("linear_trend", 100, intercept=False)
        t = np.arange(1, 101) / 100.0
        direct = (t**2).max() / (t**2).sum()
        got = noether_ratio(design)
        assert abs(got - direct) < 1e-14
        assert abs(got - 0.0296) < 1e-4


class TestBvmDiagnostic:
    def _model(self, n, seed, alpha=0.5):
        design = make_design("mean", n)
        z = 1.0 + simulate_ts(Ar1Spec(alpha, 1.0), n, seed=seed)
        return WhittleModel.from_data(z, design)

    def test_reference_draws_self_consistent(self):
        n = 64
        model = self._model(n, 0)
        f0 = Ar1Spec(0.5, 1.0)
        post = conditional_theta_posterior(model, f0)
        rng = np.random.default_rng(1)
        draws = rng.multivariate_normal(post.mean, post.cov, size=100000)
        diag = bvm_diagnostic(draws, model, f0)
        assert diag.mean_shift < 0.05
        assert diag.cov_discrepancy < 0.05
        assert diag.n == n

    def test_doubled_covariance_saturates(self):
        model = self._model(64, 2)
        f0 = Ar1Spec(0.5, 1.0)
        post = conditional_theta_posterior(model, f0)
        rng = np.random.default_rng(3)
        draws = rng.multivariate_normal(post.mean, 2.0 * post.cov, size=100000)
        diag = bvm_diagnostic(draws, model, f0)
        assert diag.cov_discrepancy > 0.98

    def test_needs_draws(self):
        model = self._model(16, 4)
        with pytest.raises(ValueError, match="500"):
            bvm_diagnostic(np.zeros((499, 1)), model, Ar1Spec(0.0, 1.0))

    def test_degenerate_draws_rejected(self):
        model = self._model(16, 5)
        with pytest.raises(ValueError, match="degenerate"):
            bvm_diagnostic(np.ones((600, 1)), model, Ar1Spec(0.0, 1.0))

    def test_cov_discrepancy_decreases_with_n(self, bvm_diag_by_n):
        med128 = np.median([d.cov_discrepancy for d in bvm_diag_by_n[128]])
        med512 = np.median([d.cov_discrepancy for d in bvm_diag_by_n[512]])
        assert med512 < med128


class TestSerializers:
    def test_json_round_trip(self, tmp_path):
        path = tmp_path / "report.json"
        payload = {"b": [1, 2], "a": {"x": 0.5}}
        write_json(path, payload)
        assert json.loads(path.read_text()) == payload

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "scan.csv"
        rows = [p.as_dict() for p in counterexample_scan(0.5, n_list=(64, 128))]
        write_csv(path, rows, ["n", "value", "closed_form", "direct", "path_gap"])
        with open(path) as fh:
            back = list(csv.DictReader(fh))
        assert [int(r["n"]) for r in back] == [64, 128]
        assert abs(float(back[0]["value"]) - rows[0]["value"]) < 1e-15
