import numpy as np
import pytest

from blurtv.estimator import MonteCarloPlan, blurred_tv_monte_carlo
from blurtv.kernels import gaussian_kernel, trimodal_kernel
from blurtv.oracle import (
    UnsupportedOracleError,
    gaussian_dist,
    mixture_dist_1d,
    oracle_blurred_tv_gaussian,
    oracle_blurred_tv_quadrature_1d,
    oracle_from_config,
    oracle_to_config,
    oracle_tv_gaussian,
    oracle_tv_quadrature_1d,
    sample_oracle,
    spiked_gaussian_pair,
)
from blurtv.rng import substream

P1 = gaussian_dist([1.0], [[1.0]])
Q1 = gaussian_dist([-1.0], [[1.0]])


class TestGaussianClosedForm:
    def test_small_h_anchor(self):
        # approaches the unsmoothed TV 2*Phi(1) - 1 ~ 0.683
        assert oracle_blurred_tv_gaussian(P1, Q1, 1e-3) == pytest.approx(
            0.682689250166, abs=1e-9
        )

    def test_h_one(self):
        assert oracle_blurred_tv_gaussian(P1, Q1, 1.0) == pytest.approx(
            0.520499877813, abs=1e-9
        )

    def test_tv_limit(self):
        assert oracle_tv_gaussian(P1, Q1) == pytest.approx(0.682689492137, abs=1e-9)

    def test_unequal_covariance_unsupported(self):
        R = gaussian_dist([0.0], [[2.0]])
        with pytest.raises(UnsupportedOracleError, match="equal covariances"):
            oracle_blurred_tv_gaussian(P1, R, 1.0)

    def test_monotone_in_h_and_gap(self):
        hs = np.geomspace(0.01, 50, 40)
        vals = [oracle_blurred_tv_gaussian(P1, Q1, h) for h in hs]
        assert np.all(np.diff(vals) <= 0)
        gaps = np.linspace(0.1, 5, 20)
        vals = [
            oracle_blurred_tv_gaussian(
                gaussian_dist([g], [[1.0]]), gaussian_dist([-g], [[1.0]]), 0.5
            )
            for g in gaps
        ]
        assert np.all(np.diff(vals) >= 0)

    def test_vanishes_at_large_h(self):
        assert oracle_blurred_tv_gaussian(P1, Q1, 100.0) < 0.02

    def test_spiked_pair_value_free_of_tau_and_d(self):
        # the mean gap lies along e1 where the variance is exactly 1, so the
        # closed form reduces to the 1-D value for every tau and d
        beta, h = 1.5, 0.7
        expected = oracle_blurred_tv_gaussian(
            gaussian_dist([beta], [[1.0]]), gaussian_dist([-beta], [[1.0]]), h
        )
        for tau in (0.01, 0.3, 1.0):
            for d in (2, 5, 20):
                P, Q = spiked_gaussian_pair(beta, tau, d)
                assert oracle_blurred_tv_gaussian(P, Q, h) == pytest.approx(expected, abs=1e-12)

    def test_spiked_pair_against_monte_carlo_d2(self):
        P, Q = spiked_gaussian_pair(1.0, 0.5, 2)
        X = sample_oracle(P, 400, substream(5, 0))
        Y = sample_oracle(Q, 400, substream(5, 1))
        mc = blurred_tv_monte_carlo(X, Y, gaussian_kernel(2), 1.0, MonteCarloPlan(B=30_000, seed=2))
        # empirical estimate is biased upward at finite n, so allow a loose band
        oracle = oracle_blurred_tv_gaussian(P, Q, 1.0)
        assert abs(mc - oracle) < 0.1

    def test_subspace_embedding_identity(self):
        # 1-D Gaussians embedded in R^d via an orthonormal column: the
        # d-dimensional closed form equals the 1-D closed form exactly
        mu, sd2, h = 2.0, 1.0, 0.8
        oneD = oracle_blurred_tv_gaussian(
            gaussian_dist([mu], [[sd2]]), gaussian_dist([-mu], [[sd2]]), h
        )
        for d in (2, 10, 50):
            rng = substream(77, d)
            a = rng.standard_normal(d)
            a /= np.linalg.norm(a)
            cov = sd2 * np.outer(a, a)
            P = gaussian_dist(mu * a, cov)
            Q = gaussian_dist(-mu * a, cov)
            assert oracle_blurred_tv_gaussian(P, Q, h) == pytest.approx(oneD, abs=1e-12)


class TestQuadratureOracle:
    def test_cross_validates_closed_form(self):
        kern = gaussian_kernel(1)
        for beta in (0.2, 0.5, 1.0, 2.0, 4.0):
            P = gaussian_dist([beta], [[1.0]])
            Q = gaussian_dist([-beta], [[1.0]])
            for h in (0.05, 0.3, 1.0, 3.0, 10.0):
                closed = oracle_blurred_tv_gaussian(P, Q, h)
                quad = oracle_blurred_tv_quadrature_1d(P, Q, kern, h)
                assert closed == pytest.approx(quad, abs=1e-6)

    def test_gaussian_kernel_curve_monotone(self):
        hs = np.geomspace(0.05, 15, 30)
        vals = [oracle_blurred_tv_quadrature_1d(P1, Q1, gaussian_kernel(1), h) for h in hs]
        assert np.all(np.diff(vals) <= 1e-8)

    def test_trimodal_kernel_curve_rises_somewhere(self):
        hs = 0.05 * 1.1 ** np.arange(61)
        vals = np.array(
            [oracle_blurred_tv_quadrature_1d(P1, Q1, trimodal_kernel(), h) for h in hs]
        )
        assert np.max(np.diff(vals)) >= 1e-3

    def test_both_decay_at_large_h(self):
        for kern in (gaussian_kernel(1), trimodal_kernel()):
            assert oracle_blurred_tv_quadrature_1d(P1, Q1, kern, 100.0) < 0.02

    def test_mixture_distributions(self):
        M = mixture_dist_1d([-2.0, 2.0], [1.0, 1.0], [0.5, 0.5])
        v = oracle_blurred_tv_quadrature_1d(M, Q1, gaussian_kernel(1), 0.5)
        assert 0.0 < v < 1.0

    def test_tv_limit_quadrature_matches_closed_form(self):
        assert oracle_tv_quadrature_1d(P1, Q1) == pytest.approx(0.682689492137, abs=1e-6)


class TestSampling:
    def test_identity_covariance_lln(self):
        d = gaussian_dist([0.0, 0.0], np.eye(2))
        pts = sample_oracle(d, 100_000, substream(1, 0)).points
        cov = np.cov(pts.T)
        assert np.all(np.abs(cov - np.eye(2)) < 0.02)
        assert np.all(np.abs(pts.mean(axis=0)) < 0.02)

    def test_degenerate_weights_collapse_to_first_component(self):
        M = mixture_dist_1d([-4.0, 0.0, 4.0], [1.0, 1.0, 1.0], [1.0, 0.0, 0.0])
        pts = sample_oracle(M, 2000, substream(2, 0)).points
        assert abs(pts.mean() + 4.0) < 0.1

    def test_reproducible(self):
        d = gaussian_dist([1.0], [[2.0]])
        a = sample_oracle(d, 10, substream(3, 1)).points
        b = sample_oracle(d, 10, substream(3, 1)).points
        np.testing.assert_array_equal(a, b)

    def test_spiked_pair_sample_covariance(self):
        P, _ = spiked_gaussian_pair(1.0, 0.25, 3)
        pts = sample_oracle(P, 200_000, substream(4, 0)).points
        cov = np.cov(pts.T)
        expected = 0.75 * np.outer([1, 0, 0], [1, 0, 0]) + 0.25 * np.eye(3)
        assert np.all(np.abs(cov - expected) < 0.02)

    def test_non_psd_covariance_rejected(self):
        with pytest.raises(ValueError, match="semidefinite"):
            gaussian_dist([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])


class TestConfig:
    def test_round_trip(self):
        for d in (P1, mixture_dist_1d([0.0, 1.0], [1.0, 0.5], [0.3, 0.7])):
            d2 = oracle_from_config(oracle_to_config(d))
            assert d2.family == d.family
            np.testing.assert_array_equal(d2.mean, d.mean)
            np.testing.assert_array_equal(d2.cov, d.cov)

    def test_tau_domain(self):
        with pytest.raises(ValueError, match="tau"):
            spiked_gaussian_pair(1.0, 0.0, 5)
