"""Tests for the real DFT, frequency-domain covariances, and designs.

Hand-derived oracle values are frozen as literals; each is annotated
with the closed form it came from.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectreg import (
    build_dft_matrix,
    build_freq_cov,
    dft_apply,
    dft_apply_inverse,
    gram_spectrum,
    make_design,
)
from spectreg.fourier import FAST_TRANSFORM_MIN_N, fourier_frequencies


class TestDftMatrix:
    def test_n2_rows(self):
        # e_1 = exp(-pi*i) = -1, so the even-n closing row is ((-1)^t / sqrt(2))
        F = build_dft_matrix(2)
        expected = np.array([[1.0, 1.0], [-1.0, 1.0]]) / math.sqrt(2.0)
        np.testing.assert_allclose(F.rows, expected, atol=1e-15)

    def test_constant_vector_n4(self):
        F = build_dft_matrix(4)
        c = 3.7
        out = F.rows @ np.full(4, c)
        np.testing.assert_allclose(out, [2.0 * c, 0.0, 0.0, 0.0], atol=1e-12)

    def test_first_row_constant(self):
        for n in (2, 3, 8, 17):
            F = build_dft_matrix(n)
            np.testing.assert_allclose(F.rows[0], np.full(n, n ** -0.5), atol=1e-15)

    @pytest.mark.parametrize("n", list(range(2, 257)))
    def test_orthogonality(self, n):
        F = build_dft_matrix(n)
        err = np.abs(F.rows @ F.rows.T - np.eye(n)).max()
        assert err < 1e-10

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            build_dft_matrix(1)

    @given(st.integers(min_value=2, max_value=128), st.integers(min_value=0, max_value=2**31))
    @settings(max_examples=40, deadline=None)
    def test_parseval(self, n, seed):
        v = np.random.default_rng(seed).standard_normal(n)
        y = build_dft_matrix(n).rows @ v
        assert abs(np.linalg.norm(y) - np.linalg.norm(v)) < 1e-10


class TestDftApply:
    @pytest.mark.parametrize("n", [2, 3, 16, 63, 64, 257])
    def test_matches_dense(self, n):
        rng = np.random.default_rng(n)
        v = rng.standard_normal(n)
        dense = build_dft_matrix(n).rows @ v
        np.testing.assert_allclose(dft_apply(v), dense, atol=1e-10)

    def test_fast_path_matches_dense(self):
        n = FAST_TRANSFORM_MIN_N + 23
        rng = np.random.default_rng(0)
        v = rng.standard_normal(n)
        dense = build_dft_matrix(n).rows @ v
        np.testing.assert_allclose(dft_apply(v), dense, atol=1e-9)

    @pytest.mark.parametrize("n", [5, 64, 2048])
    def test_inverse_round_trip(self, n):
        rng = np.random.default_rng(n + 1)
        v = rng.standard_normal(n)
        np.testing.assert_allclose(dft_apply_inverse(dft_apply(v)), v, atol=1e-10)

    def test_matrix_argument(self):
        rng = np.random.default_rng(3)
        V = rng.standard_normal((12, 3))
        dense = build_dft_matrix(12).rows @ V
        np.testing.assert_allclose(dft_apply(V), dense, atol=1e-10)


class TestFreqCov:
    def test_constant_spectrum(self):
        for n in (4, 5, 12):
            d = build_freq_cov(lambda w: np.full_like(w, 0.25), n)
            np.testing.assert_allclose(d.diag, 2.0 * math.pi * 0.25, atol=1e-14)

    def test_odd_layout_n5(self):
        f = lambda w: 1.0 + w  # injective, so duplicates are detectable
        lam1, lam2 = 2.0 * math.pi / 5.0, 4.0 * math.pi / 5.0
        d = build_freq_cov(f, 5)
        expected = 2.0 * math.pi * np.array([f(0.0), f(lam1), f(lam1), f(lam2), f(lam2)])
        np.testing.assert_allclose(d.diag, expected, atol=1e-12)

    def test_even_layout_n4(self):
        f = lambda w: 1.0 + w
        lam1 = 2.0 * math.pi / 4.0
        d = build_freq_cov(f, 4)
        expected = 2.0 * math.pi * np.array([f(0.0), f(lam1), f(lam1), f(math.pi)])
        np.testing.assert_allclose(d.diag, expected, atol=1e-12)

    def test_even_duplication_pattern(self):
        d = build_freq_cov(lambda w: 1.0 + w, 8)
        assert d.diag[0] not in d.diag[1:]
        assert d.diag[-1] not in d.diag[:-1]
        interior = d.diag[1:-1]
        np.testing.assert_allclose(interior[0::2], interior[1::2], atol=1e-14)

    def test_rejects_nonpositive_spectrum(self):
        with pytest.raises(ValueError):
            build_freq_cov(lambda w: np.cos(w), 8)  # cos(pi) < 0

    @given(
        st.floats(min_value=0.0, max_value=10.0),
        st.floats(min_value=0.0, max_value=10.0),
    )
    @settings(max_examples=30, deadline=None)
    def test_linearity(self, a, b):
        f = lambda w: 1.0 + 0.5 * np.cos(w) ** 2
        g = lambda w: 2.0 + np.sin(w) ** 2
        n = 11
        lhs = build_freq_cov(lambda w: a * f(w) + b * g(w) + 1.0, n).diag
        rhs = a * build_freq_cov(f, n).diag + b * build_freq_cov(g, n).diag
        rhs = rhs + build_freq_cov(lambda w: np.ones_like(w), n).diag
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12)

    def test_frequencies_layout(self):
        distinct, expand, mult = fourier_frequencies(6)
        np.testing.assert_allclose(distinct, [0.0, math.pi / 3, 2 * math.pi / 3, math.pi])
        np.testing.assert_allclose(mult, [1.0, 2.0, 2.0, 1.0])
        assert expand.tolist() == [0, 1, 1, 2, 2, 3]


class TestMakeDesign:
    def test_mean_transform(self):
        d = make_design("mean", 4)
        np.testing.assert_allclose(d.Xtilde[:, 0], [2.0, 0.0, 0.0, 0.0], atol=1e-12)

    def test_mean_l1_mass(self):
        for n in (3, 10, 65):
            d = make_design("mean", n)
            assert abs(np.abs(d.Xtilde).sum() - math.sqrt(n)) < 1e-10
            assert abs(d.Xtilde[0, 0] - math.sqrt(n)) < 1e-12

    def test_trend_cotangent_transform(self):
        # For x_t = t/n:  e_0 . x = (n+1)/(2 sqrt n),  c_j . x = 1/sqrt(2n),
        # s_j . x = cot(lambda_j/2)/sqrt(2n), from sum_t t e^{i lam t} = n/2 - i(n/2)cot(lam/2)
        n = 5
        d = make_design("linear_trend", n, intercept=False)
        lam1, lam2 = 2.0 * math.pi / 5.0, 4.0 * math.pi / 5.0
        root2n = math.sqrt(2.0 * n)
        expected = np.array(
            [
                (n + 1) / (2.0 * math.sqrt(n)),
                1.0 / root2n,
                1.0 / math.tan(lam1 / 2.0) / root2n,
                1.0 / root2n,
                1.0 / math.tan(lam2 / 2.0) / root2n,
            ]
        )
        np.testing.assert_allclose(d.Xtilde[:, 0], expected, atol=1e-12)

    def test_trend_even_n_closing_row(self):
        # even n adds e_{n/2} . x = 1/(2 sqrt n)
        n = 8
        d = make_design("linear_trend", n, intercept=False)
        assert abs(d.Xtilde[-1, 0] - 1.0 / (2.0 * math.sqrt(n))) < 1e-12

    def test_seasonal_period_one_is_trend(self):
        a = make_design("trend_seasonal", 24, period=1)
        b = make_design("linear_trend", 24)
        np.testing.assert_allclose(a.X, b.X, atol=0)
        np.testing.assert_allclose(a.Xtilde, b.Xtilde, atol=1e-12)

    def test_seasonal_shape(self):
        d = make_design("trend_seasonal", 48, period=12)
        assert d.X.shape == (48, 13)
        # indicator columns: one per season except the omitted last
        assert set(np.unique(d.X[:, 2:])) == {0.0, 1.0}
        np.testing.assert_allclose(d.X[:, 2:].sum(axis=1)[:11], np.ones(11))

    def test_custom_design(self):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((20, 3))
        d = make_design("custom", 20, X=X)
        np.testing.assert_allclose(d.Xtilde, build_dft_matrix(20).rows @ X, atol=1e-12)

    def test_custom_rank_deficient_rejected(self):
        X = np.ones((10, 2))
        with pytest.raises(ValueError):
            make_design("custom", 10, X=X)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            make_design("cubic", 10)

    def test_transform_is_orthogonal_image(self):
        d = make_design("trend_seasonal", 36, period=6)
        F = build_dft_matrix(36)
        np.testing.assert_allclose(d.Xtilde, F.rows @ d.X, atol=1e-12)


class TestGramSpectrum:
    def test_mean(self):
        lo, hi = gram_spectrum(make_design("mean", 37))
        assert abs(lo - 1.0) < 1e-12 and abs(hi - 1.0) < 1e-12

    def test_trend_limit(self):
        # eigenvalues of [[1, 1/2], [1/2, 1/3]]: (2/3) +/- sqrt(13)/6
        lim_lo = 2.0 / 3.0 - math.sqrt(13.0) / 6.0
        lim_hi = 2.0 / 3.0 + math.sqrt(13.0) / 6.0
        direct = np.linalg.eigvalsh(np.array([[1.0, 0.5], [0.5, 1.0 / 3.0]]))
        np.testing.assert_allclose(direct, [lim_lo, lim_hi], atol=1e-12)
        lo, hi = gram_spectrum(make_design("linear_trend", 4096))
        assert abs(lo - lim_lo) < 1e-2
        assert abs(hi - lim_hi) < 1e-2

    def test_seasonal_stability(self):
        vals = [gram_spectrum(make_design("trend_seasonal", n, period=4)) for n in (1024, 2048, 4096)]
        los = [v[0] for v in vals]
        his = [v[1] for v in vals]
        assert min(los) > 0.0
        assert max(los) / min(los) < 1.05
        assert max(his) / min(his) < 1.05

    @pytest.mark.parametrize(
        "kind,kwargs",
        [("mean", {}), ("linear_trend", {}), ("trend_seasonal", {"period": 4})],
    )
    def test_bounds_stable_under_doubling(self, kind, kwargs):
        pairs = [gram_spectrum(make_design(kind, n, **kwargs)) for n in (256, 512, 1024)]
        for lo, hi in pairs:
            assert 0.0 < lo <= hi < 10.0
        los = [p[0] for p in pairs]
        assert max(los) / min(los) < 1.10
