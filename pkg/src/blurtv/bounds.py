"""Distribution-free confidence bounds on the blurred TV distance.

Five constructions: the fixed-bandwidth bounds from sample splitting and
bounded differences (naive), their Monte Carlo counterparts, bounds uniform
over all bandwidths via monotonized envelopes, bandwidth-adaptive bounds
driven by the pairwise shift-modulus variance proxy, and the combined
construction that is simultaneously Monte Carlo, adaptive, and uniform
(upper bound only).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist
from scipy.special import gammaln

from .estimator import (
    BandwidthGrid,
    MonteCarloPlan,
    blurred_tv_monte_carlo,
    blurred_tv_quadrature_1d,
    lo_scan_quadrature,
    sup_scan_monte_carlo,
    sup_scan_quadrature,
)
from .kernels import Kernel, check_bandwidth, shift_modulus, shift_modulus_gaussian_batch
from .measures import EmpiricalMeasure, Sample, split_halves

__all__ = [
    "BoundSpec",
    "BoundResult",
    "VarianceProxy",
    "METHODS",
    "epsilon_nm",
    "epsilon_B",
    "r_constants",
    "variance_proxy",
    "bounds_naive",
    "bounds_monte_carlo",
    "bounds_uniform",
    "bounds_adaptive",
    "bounds_combined",
    "compute_bound",
    "convergence_bound",
]

METHODS = ("naive", "monte_carlo", "uniform", "adaptive", "combined")


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    return alpha


def epsilon_nm(n: int, m: int, alpha: float) -> float:
    """Two-sample bounded-difference margin sqrt(log(1/alpha)/2 * (1/n + 1/m))."""
    alpha = _check_alpha(alpha)
    if n < 1 or m < 1:
        raise ValueError(f"sample sizes must be >= 1, got n={n}, m={m}")
    return float(np.sqrt(0.5 * np.log(1.0 / alpha) * (1.0 / n + 1.0 / m)))


def epsilon_B(B: int, alpha: float) -> float:
    """Monte Carlo margin sqrt(log(1/alpha) / (2B))."""
    alpha = _check_alpha(alpha)
    if B < 1:
        raise ValueError(f"Monte Carlo size must be >= 1, got {B}")
    return float(np.sqrt(np.log(1.0 / alpha) / (2.0 * B)))


def r_constants(alpha: float) -> tuple[float, float]:
    """The Bernstein-type constants (sqrt(2 log(2/alpha)), sqrt(log(16/alpha)))."""
    alpha = _check_alpha(alpha)
    r1 = float(np.sqrt(2.0 * np.log(2.0 / alpha)))
    r2 = float(np.sqrt(np.log(16.0 / alpha)))
    return r1, r2


@dataclass(frozen=True)
class VarianceProxy:
    """Pairwise shift-modulus statistic; always within [0, 1/n + 1/m]."""

    value: float
    n: int
    m: int

    def __post_init__(self):
        cap = 1.0 / self.n + 1.0 / self.m
        if not 0.0 <= self.value <= cap:
            raise ValueError(f"variance proxy {self.value} outside [0, {cap}]")

    @property
    def cap(self) -> float:
        return 1.0 / self.n + 1.0 / self.m


def _pairwise_modulus_sq_mean(points: np.ndarray, kernel: Kernel, h: float) -> float:
    """Mean over unordered pairs of the squared shift modulus of (x_i - x_j)/h."""
    n = points.shape[0]
    if kernel.is_gaussian:
        dists = pdist(points) / h
        w = np.clip(shift_modulus_gaussian_batch(dists), 0.0, 1.0)
        return float(np.mean(w * w))
    # Non-Gaussian kernels go through quadrature pair by pair; this is
    # O(n^2) integrations and is only intended for desk-scale n.
    diffs = pdist(points).astype(float)  # symmetric kernels: modulus depends on |delta|
    vals, inverse = np.unique(diffs, return_inverse=True)
    w = np.array([shift_modulus(kernel, [v / h]) for v in vals])
    w = np.clip(w[inverse], 0.0, 1.0)
    return float(np.mean(w * w))


def variance_proxy(
    X: Sample | EmpiricalMeasure, Y: Sample | EmpiricalMeasure, kernel: Kernel, h: float
) -> VarianceProxy:
    """The pairwise variance proxy: per-sample mean squared shift modulus
    of the rescaled within-sample differences, each divided by its sample size.
    """
    X = EmpiricalMeasure.of(X)
    Y = EmpiricalMeasure.of(Y)
    h = check_bandwidth(h)
    if X.n < 2 or Y.n < 2:
        raise ValueError(f"variance proxy requires n, m >= 2, got n={X.n}, m={Y.n}")
    vx = _pairwise_modulus_sq_mean(X.points, kernel, h) / X.n
    vy = _pairwise_modulus_sq_mean(Y.points, kernel, h) / Y.n
    return VarianceProxy(value=vx + vy, n=X.n, m=Y.n)


@dataclass(frozen=True)
class BoundResult:
    """Estimate plus lower/upper confidence bounds and their margin breakdown.

    ``ucb_raw`` keeps the unclamped value so the additive margins stay
    auditable; ``ucb`` clamps to 1 since TV never exceeds it.
    """

    method: str
    alpha: float
    h: float
    n: int
    m: int
    estimate: float
    lcb: float
    ucb_raw: float
    seed: int | None = None
    B: int | None = None
    margins: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lcb < 0:
            raise ValueError("lower bound must be nonnegative")
        if self.lcb > min(self.ucb_raw, 1.0) + 1e-12:
            raise ValueError(f"lower bound {self.lcb} exceeds upper bound {self.ucb_raw}")

    @property
    def ucb(self) -> float:
        return min(self.ucb_raw, 1.0)

    @property
    def ucb_margin(self) -> float:
        return self.ucb_raw - self.estimate

    @property
    def lcb_margin(self) -> float:
        return self.estimate - self.lcb

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "alpha": self.alpha,
            "h": self.h,
            "n": self.n,
            "m": self.m,
            "B": self.B,
            "estimate": self.estimate,
            "lcb": self.lcb,
            "ucb_raw": self.ucb_raw,
            "ucb": self.ucb,
            "margins": dict(self.margins),
            "diagnostics": dict(self.diagnostics),
            "seed": self.seed,
        }


def _split_estimates_quadrature(X, Y, kernel, h, tol):
    sx = split_halves(X)
    sy = split_halves(Y)
    dx = blurred_tv_quadrature_1d(sx.first, sx.second, kernel, h, tol)
    dy = blurred_tv_quadrature_1d(sy.first, sy.second, kernel, h, tol)
    return dx, dy


def bounds_naive(
    X: Sample | EmpiricalMeasure,
    Y: Sample | EmpiricalMeasure,
    kernel: Kernel,
    h: float,
    alpha: float,
    tol: float = 1e-6,
) -> BoundResult:
    """Fixed-bandwidth bounds: estimate +- bounded-difference margins.

    Upper: estimate + eps(n, m, alpha). Lower: estimate minus both half-split
    estimates minus 3 eps(n-1, m-1, alpha), floored at 0; pinned to 0 when
    either sample has a single point (the split is undefined there).
    """
    X = EmpiricalMeasure.of(X)
    Y = EmpiricalMeasure.of(Y)
    alpha = _check_alpha(alpha)
    h = check_bandwidth(h)
    n, m = X.n, Y.n

    est = blurred_tv_quadrature_1d(X, Y, kernel, h, tol)
    eps_u = epsilon_nm(n, m, alpha)
    margins = {"epsilon_ucb": eps_u}
    diagnostics: dict = {}

    if n < 2 or m < 2:
        lcb = 0.0
        diagnostics["lcb"] = "n=1 or m=1: lower bound pinned to 0"
    else:
        dx, dy = _split_estimates_quadrature(X, Y, kernel, h, tol)
        eps_l = 3.0 * epsilon_nm(n - 1, m - 1, alpha)
        lcb = max(est - dx - dy - eps_l, 0.0)
        margins.update({"split_x": dx, "split_y": dy, "epsilon_lcb": eps_l})

    return BoundResult(
        method="naive",
        alpha=alpha,
        h=h,
        n=n,
        m=m,
        estimate=est,
        lcb=lcb,
        ucb_raw=est + eps_u,
        margins=margins,
        diagnostics=diagnostics,
    )


def bounds_monte_carlo(
    X: Sample | EmpiricalMeasure,
    Y: Sample | EmpiricalMeasure,
    kernel: Kernel,
    h: float,
    alpha: float,
    B: int,
    seed: int = 0,
) -> BoundResult:
    """Monte Carlo bounds: the naive construction at level alpha/2 plus
    Monte Carlo margins.

    The three estimates (full, X-split, Y-split) use independent substreams
    keyed (seed, 0), (seed, 1), (seed, 2).
    """
    X = EmpiricalMeasure.of(X)
    Y = EmpiricalMeasure.of(Y)
    alpha = _check_alpha(alpha)
    h = check_bandwidth(h)
    n, m = X.n, Y.n
    plan = MonteCarloPlan(B=B, seed=seed)
    diagnostics: dict = {}

    est = blurred_tv_monte_carlo(X, Y, kernel, h, plan, stream_key=(0,), diagnostics=diagnostics)
    eps_stat = epsilon_nm(n, m, alpha / 2.0)
    eps_mc = epsilon_B(B, alpha / 2.0)
    margins = {"epsilon_ucb_stat": eps_stat, "epsilon_ucb_mc": eps_mc}

    if n < 2 or m < 2:
        lcb = 0.0
        diagnostics["lcb"] = "n=1 or m=1: lower bound pinned to 0"
    else:
        sx = split_halves(X)
        sy = split_halves(Y)
        dx = blurred_tv_monte_carlo(
            sx.first, sx.second, kernel, h, plan, stream_key=(1,), diagnostics=diagnostics
        )
        dy = blurred_tv_monte_carlo(
            sy.first, sy.second, kernel, h, plan, stream_key=(2,), diagnostics=diagnostics
        )
        eps_l_stat = 3.0 * epsilon_nm(n - 1, m - 1, alpha / 2.0)
        eps_l_mc = np.sqrt(3.0) * epsilon_B(B, alpha / 2.0)
        lcb = max(est - dx - dy - eps_l_stat - eps_l_mc, 0.0)
        margins.update(
            {
                "split_x": dx,
                "split_y": dy,
                "epsilon_lcb_stat": eps_l_stat,
                "epsilon_lcb_mc": float(eps_l_mc),
            }
        )

    return BoundResult(
        method="monte_carlo",
        alpha=alpha,
        h=h,
        n=n,
        m=m,
        estimate=est,
        lcb=lcb,
        ucb_raw=est + eps_stat + eps_mc,
        seed=seed,
        B=B,
        margins=margins,
        diagnostics=diagnostics,
    )


def bounds_uniform(
    X: Sample | EmpiricalMeasure,
    Y: Sample | EmpiricalMeasure,
    kernel: Kernel,
    h_query: float,
    alpha: float,
    h_star: float | None = None,
    grid: BandwidthGrid | None = None,
    tol: float = 1e-6,
) -> BoundResult:
    """Bounds valid simultaneously for every bandwidth, via monotonization.

    The upper bound holds uniformly over all h > 0; the lower bound holds
    uniformly over h >= h_star and requires h_star. Without an h_star the
    lower bound is omitted (reported as 0 with a diagnostic note).
    """
    X = EmpiricalMeasure.of(X)
    Y = EmpiricalMeasure.of(Y)
    alpha = _check_alpha(alpha)
    h_query = check_bandwidth(h_query)
    n, m = X.n, Y.n
    n_min = min(n, m)
    level = alpha / n_min
    slack = 1.0 / n_min

    up = sup_scan_quadrature(X, Y, kernel, h_query, grid, tol)
    eps_u = epsilon_nm(n, m, level)
    margins = {"epsilon_ucb": eps_u, "slack": slack}
    diagnostics: dict = {
        "sup_argmax_h": up.argmax_h,
        "sup_grid_points": len(up.grid),
        "sup_grid_truncated": up.truncated,
    }

    if h_star is None:
        lcb = 0.0
        diagnostics["lcb"] = "no h_star supplied: lower bound omitted"
    elif n < 2 or m < 2:
        lcb = 0.0
        diagnostics["lcb"] = "n=1 or m=1: lower bound pinned to 0"
    else:
        h_star = check_bandwidth(h_star)
        if h_star > h_query:
            raise ValueError(f"h_star={h_star} must not exceed the query bandwidth {h_query}")
        lo = lo_scan_quadrature(X, Y, kernel, h_query, h_star, grid, tol)
        eps_l = 3.0 * epsilon_nm(n - 1, m - 1, level)
        lcb = max(lo.value - eps_l - slack, 0.0)
        margins.update({"scan_min": lo.value, "epsilon_lcb": eps_l})
        diagnostics.update(
            {"h_star": h_star, "lo_argmin_h": lo.argmin_h, "lo_grid_points": len(lo.grid)}
        )

    return BoundResult(
        method="uniform",
        alpha=alpha,
        h=h_query,
        n=n,
        m=m,
        estimate=up.value,
        lcb=lcb,
        ucb_raw=up.value + eps_u + slack,
        margins=margins,
        diagnostics=diagnostics,
    )


def bounds_adaptive(
    X: Sample | EmpiricalMeasure,
    Y: Sample | EmpiricalMeasure,
    kernel: Kernel,
    h: float,
    alpha: float,
    tol: float = 1e-6,
) -> BoundResult:
    """Bandwidth-adaptive bounds driven by the variance proxy.

    The margins scale with the square root of the variance proxy plus
    O(1/(n ^ m)) terms, so they shrink as the bandwidth grows instead of
    staying at the bounded-difference level.
    """
    X = EmpiricalMeasure.of(X)
    Y = EmpiricalMeasure.of(Y)
    alpha = _check_alpha(alpha)
    h = check_bandwidth(h)
    n, m = X.n, Y.n
    if n < 2 or m < 2:
        raise ValueError("adaptive bounds require n, m >= 2 for the variance proxy")
    if n < 4 or m < 4:
        warnings.warn(
            "adaptive bounds assume n, m >= 4; the guarantee may be vacuous below that",
            stacklevel=2,
        )

    n_min = min(n, m)
    r1, r2 = r_constants(alpha)
    sigma = variance_proxy(X, Y, kernel, h)
    sqrt_sigma = float(np.sqrt(sigma.value))
    small_u = (r1 * r1 / 3.0 + 2.0 * np.sqrt(5.0) * r1 * r2) / n_min
    small_l = (2.0 * r1 * r1 + 12.0 * np.sqrt(5.0) * r1 * r2) / n_min

    est = blurred_tv_quadrature_1d(X, Y, kernel, h, tol)
    dx, dy = _split_estimates_quadrature(X, Y, kernel, h, tol)
    lcb = max(est - dx - dy - 6.0 * sqrt_sigma * r1 - small_l, 0.0)

    margins = {
        "sigma_hat": sigma.value,
        "sigma_term_ucb": sqrt_sigma * r1,
        "small_term_ucb": float(small_u),
        "split_x": dx,
        "split_y": dy,
        "sigma_term_lcb": 6.0 * sqrt_sigma * r1,
        "small_term_lcb": float(small_l),
    }
    return BoundResult(
        method="adaptive",
        alpha=alpha,
        h=h,
        n=n,
        m=m,
        estimate=est,
        lcb=lcb,
        ucb_raw=est + sqrt_sigma * r1 + small_u,
        margins=margins,
        diagnostics={},
    )


def bounds_combined(
    X: Sample | EmpiricalMeasure,
    Y: Sample | EmpiricalMeasure,
    kernel: Kernel,
    h: float,
    alpha: float,
    B: int,
    seed: int = 0,
    grid: BandwidthGrid | None = None,
) -> BoundResult:
    """Monte Carlo + bandwidth-adaptive + uniform-over-bandwidths upper bound.

    Every constant is evaluated at level alpha / (2 (n ^ m)). The supremum
    of the Monte Carlo estimate over the grid shares one seed schedule, and
    the variance proxy is monotonized over the same grid. Upper bound only:
    the lower-bound analogue is not part of this construction.
    """
    X = EmpiricalMeasure.of(X)
    Y = EmpiricalMeasure.of(Y)
    alpha = _check_alpha(alpha)
    h = check_bandwidth(h)
    n, m = X.n, Y.n
    if n < 2 or m < 2:
        raise ValueError("combined bounds require n, m >= 2 for the variance proxy")

    n_min = min(n, m)
    level = alpha / (2.0 * n_min)
    r1, r2 = r_constants(level)
    plan = MonteCarloPlan(B=B, seed=seed)
    diagnostics: dict = {}

    up = sup_scan_monte_carlo(X, Y, kernel, h, plan, grid, stream_key=(0,), diagnostics=diagnostics)

    sig_vals = [variance_proxy(X, Y, kernel, h1).value for h1 in up.grid]
    k_sig = int(np.argmax(sig_vals))
    sigma_up = float(sig_vals[k_sig])
    sqrt_sigma = float(np.sqrt(sigma_up))

    small = (r1 * r1 / 3.0 + 2.0 * np.sqrt(5.0) * r1 * r2) / n_min
    eps_mc = epsilon_B(B, level)
    slack = 1.0 / n_min
    ucb_raw = up.value + sqrt_sigma * r1 + small + eps_mc + slack

    diagnostics.update(
        {
            "lcb": "combined method provides an upper bound only",
            "mc_sup_argmax_h": up.argmax_h,
            "mc_sup_argmax_index": up.argmax_index,
            "sigma_sup_argmax_h": float(up.grid[k_sig]),
            "sigma_sup_argmax_index": k_sig,
            "grid_points": len(up.grid),
        }
    )
    margins = {
        "level_alpha": level,
        "sigma_hat_up": sigma_up,
        "sigma_term": sqrt_sigma * r1,
        "small_term": float(small),
        "epsilon_mc": eps_mc,
        "slack": slack,
    }
    return BoundResult(
        method="combined",
        alpha=alpha,
        h=h,
        n=n,
        m=m,
        estimate=up.value,
        lcb=0.0,
        ucb_raw=ucb_raw,
        seed=seed,
        B=B,
        margins=margins,
        diagnostics=diagnostics,
    )


@dataclass(frozen=True)
class BoundSpec:
    """Declarative request for one confidence-bound computation."""

    method: str
    alpha: float
    h: float
    B: int | None = None
    h_star: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        _check_alpha(self.alpha)
        check_bandwidth(self.h)
        if self.method in ("monte_carlo", "combined"):
            if self.B is None or self.B < 1:
                raise ValueError(f"method {self.method!r} requires a Monte Carlo size B >= 1")
        if self.h_star is not None and self.h_star > self.h:
            raise ValueError(f"h_star={self.h_star} must not exceed h={self.h}")


def compute_bound(
    spec: BoundSpec,
    X: Sample | EmpiricalMeasure,
    Y: Sample | EmpiricalMeasure,
    kernel: Kernel,
    grid: BandwidthGrid | None = None,
    tol: float = 1e-6,
) -> BoundResult:
    """Dispatch a BoundSpec to the matching bound construction."""
    if spec.method == "naive":
        return bounds_naive(X, Y, kernel, spec.h, spec.alpha, tol)
    if spec.method == "monte_carlo":
        return bounds_monte_carlo(X, Y, kernel, spec.h, spec.alpha, spec.B, spec.seed)
    if spec.method == "uniform":
        return bounds_uniform(X, Y, kernel, spec.h, spec.alpha, spec.h_star, grid, tol)
    if spec.method == "adaptive":
        return bounds_adaptive(X, Y, kernel, spec.h, spec.alpha, tol)
    if spec.method == "combined":
        return bounds_combined(X, Y, kernel, spec.h, spec.alpha, spec.B, spec.seed, grid)
    raise ValueError(f"unknown method {spec.method!r}")


def convergence_bound(
    sup_density_B: float, moment_Mq: float, q: float, d: int, h: float, n: int
) -> float:
    """Closed-form rate bound on the expected estimation error of the
    smoothed empirical measure.

    Evaluates n^(-q/(2(d+q))) * 2 * M^(dq/(d+q)) * (B * Vol(unit ball) / h^d)^(q/(d+q))
    with the exact unit-ball volume pi^(d/2) / Gamma(d/2 + 1).
    """
    if sup_density_B <= 0 or moment_Mq <= 0 or q <= 0:
        raise ValueError("density bound, moment bound, and moment order must be positive")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    h = check_bandwidth(h)
    log_vol = 0.5 * d * np.log(np.pi) - gammaln(0.5 * d + 1.0)
    expo = q / (d + q)
    log_val = (
        -0.5 * expo * np.log(n)
        + np.log(2.0)
        + d * expo * np.log(moment_Mq)
        + expo * (np.log(sup_density_B) + log_vol - d * np.log(h))
    )
    return float(np.exp(log_val))
