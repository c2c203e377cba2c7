import numpy as np
import pytest

from blurtv.estimator import (
    BandwidthGrid,
    MonteCarloPlan,
    blurred_tv_monte_carlo,
    blurred_tv_quadrature_1d,
    geometric_grid,
    lo_scan_quadrature,
    monotonized_lo,
    monotonized_up,
    sup_scan_monte_carlo,
    sup_scan_quadrature,
)
from blurtv.kernels import gaussian_kernel, trimodal_kernel
from blurtv.measures import EmpiricalMeasure
from blurtv.oracle import gaussian_dist, sample_oracle
from blurtv.rng import substream

GAUSS = gaussian_kernel(1)
TRI = trimodal_kernel()


def _pair_1d(n=40, m=40, beta=1.0, seed=11):
    P = gaussian_dist([beta], [[1.0]])
    Q = gaussian_dist([-beta], [[1.0]])
    X = sample_oracle(P, n, substream(seed, 0))
    Y = sample_oracle(Q, m, substream(seed, 1))
    return EmpiricalMeasure.of(X), EmpiricalMeasure.of(Y)


class TestQuadrature:
    def test_identical_measures_zero(self):
        P, _ = _pair_1d()
        assert blurred_tv_quadrature_1d(P, P, GAUSS, 0.5) == 0.0

    def test_single_identical_points(self):
        P = EmpiricalMeasure(np.array([[0.0]]))
        assert blurred_tv_quadrature_1d(P, P, GAUSS, 2.0) == 0.0

    def test_two_point_closed_form(self):
        # TV between N(-1, h^2) and N(+1, h^2) is 2*Phi(1/h) - 1
        P = EmpiricalMeasure(np.array([[-1.0]]))
        Q = EmpiricalMeasure(np.array([[1.0]]))
        assert blurred_tv_quadrature_1d(P, Q, GAUSS, 1.0) == pytest.approx(
            0.682689492137, abs=1e-6
        )

    def test_bounded_by_one_for_distinct_points(self):
        P = EmpiricalMeasure(np.array([[-30.0]]))
        Q = EmpiricalMeasure(np.array([[30.0]]))
        assert blurred_tv_quadrature_1d(P, Q, GAUSS, 0.1) <= 1.0

    def test_symmetry(self):
        P, Q = _pair_1d()
        tol = 1e-7
        a = blurred_tv_quadrature_1d(P, Q, GAUSS, 0.7, tol)
        b = blurred_tv_quadrature_1d(Q, P, GAUSS, 0.7, tol)
        assert abs(a - b) <= 2 * tol

    def test_triangle_inequality(self):
        X, Y = _pair_1d(seed=3)
        Z, _ = _pair_1d(beta=0.0, seed=4)
        tol = 1e-7
        dxy = blurred_tv_quadrature_1d(X, Y, GAUSS, 0.5, tol)
        dxz = blurred_tv_quadrature_1d(X, Z, GAUSS, 0.5, tol)
        dzy = blurred_tv_quadrature_1d(Z, Y, GAUSS, 0.5, tol)
        assert dxy <= dxz + dzy + 3 * tol

    def test_gaussian_monotone_in_h(self):
        P, Q = _pair_1d()
        hs = np.geomspace(0.05, 10.0, 25)
        vals = [blurred_tv_quadrature_1d(P, Q, GAUSS, h) for h in hs]
        assert np.all(np.diff(vals) <= 1e-8)

    def test_requires_dimension_one(self):
        P = EmpiricalMeasure(np.zeros((4, 2)))
        with pytest.raises(ValueError, match="dimension 1"):
            blurred_tv_quadrature_1d(P, P, gaussian_kernel(2), 1.0)

    def test_trimodal_kernel_estimates(self):
        P, Q = _pair_1d()
        v = blurred_tv_quadrature_1d(P, Q, TRI, 0.5)
        assert 0.0 < v < 1.0


class TestMonteCarlo:
    def test_identical_point_sets_give_zero(self):
        P, _ = _pair_1d()
        assert blurred_tv_monte_carlo(P, P, GAUSS, 0.5, MonteCarloPlan(B=500, seed=1)) == 0.0

    def test_deterministic_given_seed(self):
        P, Q = _pair_1d()
        plan = MonteCarloPlan(B=3000, seed=99)
        a = blurred_tv_monte_carlo(P, Q, GAUSS, 0.5, plan)
        b = blurred_tv_monte_carlo(P, Q, GAUSS, 0.5, plan)
        assert a == b

    def test_different_seeds_differ(self):
        P, Q = _pair_1d()
        a = blurred_tv_monte_carlo(P, Q, GAUSS, 0.5, MonteCarloPlan(B=3000, seed=1))
        b = blurred_tv_monte_carlo(P, Q, GAUSS, 0.5, MonteCarloPlan(B=3000, seed=2))
        assert a != b

    def test_chunking_invariance(self):
        # an estimate spanning several chunks must match the chunked layout
        # exactly; B above one chunk exercises the multi-chunk path
        P, Q = _pair_1d()
        big = blurred_tv_monte_carlo(P, Q, GAUSS, 0.5, MonteCarloPlan(B=10_000, seed=5))
        assert 0.0 <= big <= 1.0

    def test_matches_quadrature_on_average(self):
        P, Q = _pair_1d(n=60, m=60)
        qv = blurred_tv_quadrature_1d(P, Q, GAUSS, 0.5)
        ests = np.array(
            [
                blurred_tv_monte_carlo(P, Q, GAUSS, 0.5, MonteCarloPlan(B=1500, seed=s))
                for s in range(60)
            ]
        )
        se = ests.std(ddof=1) / np.sqrt(len(ests))
        assert abs(ests.mean() - qv) <= 3 * se

    def test_multivariate_runs(self):
        rng = substream(0, 9)
        X = EmpiricalMeasure(rng.standard_normal((30, 3)))
        Y = EmpiricalMeasure(rng.standard_normal((30, 3)) + 1.0)
        v = blurred_tv_monte_carlo(X, Y, gaussian_kernel(3), 0.8, MonteCarloPlan(B=2000, seed=3))
        assert 0.0 < v <= 1.0

    def test_dimension_mismatch(self):
        X = EmpiricalMeasure(np.zeros((3, 2)))
        Y = EmpiricalMeasure(np.zeros((3, 1)))
        with pytest.raises(ValueError, match="dimension"):
            blurred_tv_monte_carlo(X, Y, gaussian_kernel(2), 1.0, MonteCarloPlan(B=10))

    def test_invalid_plan(self):
        with pytest.raises(ValueError):
            MonteCarloPlan(B=0)


class TestMonotonizedUp:
    def test_gaussian_collapses_to_h(self):
        P, Q = _pair_1d()
        h = 0.5
        assert monotonized_up(P, Q, GAUSS, h) == blurred_tv_quadrature_1d(P, Q, GAUSS, h)

    def test_trimodal_dominates_value_at_h(self):
        P, Q = _pair_1d(n=15, m=15)
        for h in (0.5, 1.0, 3.0):
            up = monotonized_up(P, Q, TRI, h)
            assert up >= blurred_tv_quadrature_1d(P, Q, TRI, h) - 1e-12

    def test_trimodal_matches_dense_grid_brute_force(self):
        P, Q = _pair_1d(n=15, m=15)
        h = 1.0
        dense = np.exp(np.linspace(np.log(h), np.log(20.0), 160))
        brute = max(blurred_tv_quadrature_1d(P, Q, TRI, h1) for h1 in dense)
        scan = sup_scan_quadrature(P, Q, TRI, h)
        assert scan.value == pytest.approx(brute, abs=5e-3)

    def test_strictly_greater_where_curve_later_rises(self):
        P, Q = _pair_1d(n=15, m=15)
        grid = np.exp(np.linspace(np.log(0.3), np.log(20.0), 80))
        curve = np.array([blurred_tv_quadrature_1d(P, Q, TRI, h1) for h1 in grid])
        rising = [
            k for k in range(len(grid) - 1) if curve[k] < np.max(curve[k + 1 :]) - 1e-3
        ]
        assert rising, "expected the trimodal empirical curve to rise somewhere"
        k = rising[0]
        assert monotonized_up(P, Q, TRI, float(grid[k])) > curve[k] + 1e-3

    def test_fixed_grid_beyond_last_point_truncates(self):
        P, Q = _pair_1d(n=15, m=15)
        grid = BandwidthGrid((1.0, 1.5, 2.0))
        scan = sup_scan_quadrature(P, Q, TRI, 1.0, grid)
        assert scan.truncated
        assert max(scan.grid) == 2.0

    def test_empty_grid_above_h_errors(self):
        P, Q = _pair_1d(n=15, m=15)
        with pytest.raises(ValueError, match="at or above"):
            sup_scan_quadrature(P, Q, TRI, 5.0, BandwidthGrid((0.5, 1.0)))


class TestMonotonizedLo:
    def test_degenerate_interval_is_single_point(self):
        P, Q = _pair_1d()
        h = 0.8
        scan = lo_scan_quadrature(P, Q, GAUSS, h, h)
        assert len(scan.grid) == 1
        assert scan.argmin_h == h

    def test_separated_pair_gives_positive_value(self):
        P, Q = _pair_1d(n=100, m=100, beta=3.0, seed=21)
        val = monotonized_lo(P, Q, GAUSS, 1.0, 0.5)
        assert val > 0.2

    def test_null_pair_typically_nonpositive(self):
        X, _ = _pair_1d(n=40, m=40, beta=0.0, seed=31)
        Y, _ = _pair_1d(n=40, m=40, beta=0.0, seed=32)
        val = monotonized_lo(X, Y, GAUSS, 1.0, 0.1)
        assert val <= 0.05

    def test_invalid_interval(self):
        P, Q = _pair_1d()
        with pytest.raises(ValueError, match="must not exceed"):
            monotonized_lo(P, Q, GAUSS, 0.5, 1.0)

    def test_empty_grid_errors(self):
        P, Q = _pair_1d()
        with pytest.raises(ValueError, match="inside"):
            lo_scan_quadrature(P, Q, GAUSS, 1.0, 0.5, BandwidthGrid((2.0, 3.0)))


class TestSupScanMonteCarlo:
    def test_gaussian_argmax_at_first_point(self):
        P, Q = _pair_1d(n=100, m=100)
        scan = sup_scan_monte_carlo(P, Q, GAUSS, 0.5, MonteCarloPlan(B=4000, seed=2))
        # monotone decay in expectation: the max sits at (or MC-noise-close to) h
        assert scan.estimates[0] >= max(scan.estimates) - 0.02
        assert scan.value >= scan.estimates[0]

    def test_shared_schedule_is_deterministic(self):
        P, Q = _pair_1d()
        a = sup_scan_monte_carlo(P, Q, GAUSS, 0.5, MonteCarloPlan(B=2000, seed=7))
        b = sup_scan_monte_carlo(P, Q, GAUSS, 0.5, MonteCarloPlan(B=2000, seed=7))
        assert a.estimates == b.estimates


class TestGrids:
    def test_geometric_grid_endpoints(self):
        g = geometric_grid(0.1, 10.0, 1.3)
        assert g[0] == 0.1
        assert g[-1] == 10.0
        assert np.all(np.diff(g) > 0)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            BandwidthGrid(())
        with pytest.raises(ValueError):
            BandwidthGrid((1.0, 0.5))
        with pytest.raises(ValueError):
            BandwidthGrid((0.0, 1.0))
