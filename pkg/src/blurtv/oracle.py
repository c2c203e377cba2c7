"""Ground-truth blurred TV for analytic distributions.

Gaussians with a shared covariance admit a closed form; 1-D Gaussians and
Gaussian mixtures admit exact convolution with (mixture) kernels followed by
quadrature. These are the yardsticks the estimators and bounds are tested
against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .kernels import GAUSSIAN, GAUSSIAN_MIXTURE_1D, Kernel, check_bandwidth
from .measures import Sample
from .quadrature import integrate_adaptive

__all__ = [
    "OracleDistribution",
    "UnsupportedOracleError",
    "gaussian_dist",
    "mixture_dist_1d",
    "spiked_gaussian_pair",
    "oracle_blurred_tv_gaussian",
    "oracle_tv_gaussian",
    "oracle_blurred_tv_quadrature_1d",
    "oracle_tv_quadrature_1d",
    "sample_oracle",
    "oracle_from_config",
    "oracle_to_config",
]


class UnsupportedOracleError(ValueError):
    """The requested oracle has no closed form for these inputs."""


@dataclass(frozen=True)
class OracleDistribution:
    """An analytic distribution with known smoothed densities.

    ``family='gaussian'``: ``mean`` is the (d,) mean and ``cov`` the (d, d)
    symmetric positive-semidefinite covariance. ``family='gaussian_mixture_1d'``:
    ``mean`` holds the component means, ``cov`` the per-component variances,
    and ``weights`` the mixing weights.
    """

    family: str
    mean: np.ndarray
    cov: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if self.family == GAUSSIAN:
            if mean.ndim != 1:
                raise ValueError("gaussian mean must be a vector")
            d = mean.size
            if cov.shape != (d, d):
                raise ValueError(f"covariance must be ({d}, {d}), got {cov.shape}")
            if not np.allclose(cov, cov.T, atol=1e-10):
                raise ValueError("covariance must be symmetric")
            w = np.linalg.eigvalsh(cov)
            if w.min() < -1e-10 * max(1.0, w.max()):
                raise ValueError("covariance must be positive semidefinite")
            if self.weights is not None:
                raise ValueError("gaussian distribution takes no weights")
        elif self.family == GAUSSIAN_MIXTURE_1D:
            if mean.ndim != 1 or mean.size == 0:
                raise ValueError("mixture needs at least one component mean")
            if cov.shape != mean.shape:
                raise ValueError("per-component variances must match means in length")
            if np.any(cov <= 0):
                raise ValueError("component variances must be positive")
            w = np.asarray(self.weights, dtype=float) if self.weights is not None else None
            if w is None or w.shape != mean.shape:
                raise ValueError("mixture weights must match components in length")
            if np.any(w < 0) or abs(float(w.sum()) - 1.0) > 1e-12:
                raise ValueError("mixture weights must be nonnegative and sum to 1")
            object.__setattr__(self, "weights", w)
        else:
            raise ValueError(f"unknown oracle family {self.family!r}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size if self.family == GAUSSIAN else 1


def gaussian_dist(mean, cov) -> OracleDistribution:
    """Gaussian with the given mean vector and covariance matrix."""
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    return OracleDistribution(family=GAUSSIAN, mean=mean, cov=cov)


def mixture_dist_1d(means, variances, weights) -> OracleDistribution:
    """1-D Gaussian mixture with per-component variances."""
    return OracleDistribution(
        family=GAUSSIAN_MIXTURE_1D,
        mean=np.asarray(means, dtype=float),
        cov=np.asarray(variances, dtype=float),
        weights=np.asarray(weights, dtype=float),
    )


def spiked_gaussian_pair(beta: float, tau: float, d: int):
    """The high-dimensional test pair: means +-beta e1, covariance (1-tau)e1e1' + tau I.

    tau near 0 concentrates both distributions near the e1 axis (effective
    dimension ~1); tau = 1 is isotropic.
    """
    if not 0 < tau <= 1:
        raise ValueError(f"tau must lie in (0, 1], got {tau}")
    e1 = np.zeros(d)
    e1[0] = 1.0
    cov = (1.0 - tau) * np.outer(e1, e1) + tau * np.eye(d)
    return gaussian_dist(beta * e1, cov), gaussian_dist(-beta * e1, cov)


def _mahalanobis_gap(P: OracleDistribution, Q: OracleDistribution, shared_cov: np.ndarray) -> float:
    gap = P.mean - Q.mean
    sol = np.linalg.solve(shared_cov, gap)
    return float(np.sqrt(max(gap @ sol, 0.0)))


def _require_equal_cov_gaussians(P: OracleDistribution, Q: OracleDistribution) -> np.ndarray:
    if P.family != GAUSSIAN or Q.family != GAUSSIAN:
        raise UnsupportedOracleError("closed form requires two gaussian distributions")
    if P.dim != Q.dim:
        raise ValueError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    if not np.allclose(P.cov, Q.cov, atol=1e-12):
        raise UnsupportedOracleError(
            "closed form requires equal covariances; use the 1-D quadrature oracle"
        )
    return P.cov


def oracle_blurred_tv_gaussian(P: OracleDistribution, Q: OracleDistribution, h: float) -> float:
    """Blurred TV between equal-covariance Gaussians under the Gaussian kernel.

    Equals 2*Phi(delta/2) - 1 where delta is the Mahalanobis gap of the means
    under the smoothed covariance (shared covariance plus h^2 I).
    """
    h = check_bandwidth(h)
    cov = _require_equal_cov_gaussians(P, Q)
    smoothed = cov + h * h * np.eye(P.dim)
    delta = _mahalanobis_gap(P, Q, smoothed)
    return float(np.clip(2.0 * ndtr(0.5 * delta) - 1.0, 0.0, 1.0))


def oracle_tv_gaussian(P: OracleDistribution, Q: OracleDistribution) -> float:
    """Unsmoothed TV between equal-covariance Gaussians (the h -> 0 limit)."""
    cov = _require_equal_cov_gaussians(P, Q)
    if np.linalg.eigvalsh(cov).min() <= 0:
        raise UnsupportedOracleError("unsmoothed TV requires a positive-definite covariance")
    delta = _mahalanobis_gap(P, Q, cov)
    return float(np.clip(2.0 * ndtr(0.5 * delta) - 1.0, 0.0, 1.0))


def _as_mixture_1d(dist: OracleDistribution):
    """(means, variances, weights) arrays of a 1-D distribution."""
    if dist.family == GAUSSIAN:
        if dist.dim != 1:
            raise UnsupportedOracleError("quadrature oracle requires dimension 1")
        return dist.mean.copy(), np.array([dist.cov[0, 0]]), np.array([1.0])
    return dist.mean.copy(), dist.cov.copy(), dist.weights.copy()


def _kernel_as_mixture(kernel: Kernel):
    if kernel.family == GAUSSIAN:
        if kernel.dim != 1:
            raise UnsupportedOracleError("quadrature oracle requires a 1-D kernel")
        return np.array([0.0]), np.array([1.0]), np.array([1.0])
    return (
        np.asarray(kernel.means, dtype=float),
        np.asarray(kernel.sds, dtype=float) ** 2,
        np.asarray(kernel.weights, dtype=float),
    )


def _convolve_mixtures(means, variances, weights, k_means, k_vars, k_weights, h):
    """Exact convolution of a mixture with an h-scaled kernel mixture."""
    m = (means[:, None] + h * k_means[None, :]).ravel()
    v = (variances[:, None] + h * h * k_vars[None, :]).ravel()
    w = (weights[:, None] * k_weights[None, :]).ravel()
    return m, v, w


def _mixture_tv_quadrature(m1, v1, w1, m2, v2, w2, tol) -> float:
    """TV between two 1-D Gaussian mixtures by adaptive quadrature."""
    s1, s2 = np.sqrt(v1), np.sqrt(v2)

    def pdf(m, s, w, z):
        t = (z[:, None] - m[None, :]) / s[None, :]
        return (np.exp(-0.5 * t * t) / (np.sqrt(2.0 * np.pi) * s[None, :])) @ w

    lo = float(min((m1 - 12 * s1).min(), (m2 - 12 * s2).min()))
    hi = float(max((m1 + 12 * s1).max(), (m2 + 12 * s2).max()))
    breaks = np.unique(np.concatenate([m1, m2]))

    def integrand(z):
        return np.abs(pdf(m1, s1, w1, z) - pdf(m2, s2, w2, z))

    val = 0.5 * integrate_adaptive(integrand, lo, hi, breakpoints=breaks, tol=2.0 * tol)
    return float(np.clip(val, 0.0, 1.0))


def oracle_blurred_tv_quadrature_1d(
    P: OracleDistribution,
    Q: OracleDistribution,
    kernel: Kernel,
    h: float,
    tol: float = 1e-6,
) -> float:
    """Blurred TV between 1-D analytic mixtures under any supported kernel.

    Both smoothed distributions are exact Gaussian mixtures (component means
    shift by h times the kernel means, variances add in quadrature), so the
    only numerical step is the final 1-D integration.
    """
    h = check_bandwidth(h)
    pm, pv, pw = _as_mixture_1d(P)
    qm, qv, qw = _as_mixture_1d(Q)
    km, kv, kw = _kernel_as_mixture(kernel)
    m1, v1, w1 = _convolve_mixtures(pm, pv, pw, km, kv, kw, h)
    m2, v2, w2 = _convolve_mixtures(qm, qv, qw, km, kv, kw, h)
    return _mixture_tv_quadrature(m1, v1, w1, m2, v2, w2, tol)


def oracle_tv_quadrature_1d(P: OracleDistribution, Q: OracleDistribution, tol: float = 1e-6) -> float:
    """Unsmoothed TV between two 1-D analytic mixtures (the h -> 0 limit)."""
    pm, pv, pw = _as_mixture_1d(P)
    qm, qv, qw = _as_mixture_1d(Q)
    return _mixture_tv_quadrature(pm, pv, pw, qm, qv, qw, tol)


def sample_oracle(dist: OracleDistribution, n: int, rng: np.random.Generator, label: str = "") -> Sample:
    """n iid draws from an analytic distribution, deterministic given the rng."""
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    if dist.family == GAUSSIAN:
        w, v = np.linalg.eigh(dist.cov)
        if w.min() < -1e-10 * max(1.0, w.max()):
            raise ValueError("covariance must be positive semidefinite")
        factor = v * np.sqrt(np.clip(w, 0.0, None))
        z = rng.standard_normal((n, dist.dim))
        return Sample(dist.mean[None, :] + z @ factor.T, label=label)
    comp = rng.choice(dist.mean.size, size=n, p=dist.weights)
    z = rng.standard_normal(n)
    pts = dist.mean[comp] + np.sqrt(dist.cov[comp]) * z
    return Sample(pts[:, None], label=label)


def oracle_to_config(dist: OracleDistribution) -> dict:
    if dist.family == GAUSSIAN:
        return {"family": GAUSSIAN, "mean": dist.mean.tolist(), "cov": dist.cov.tolist()}
    return {
        "family": GAUSSIAN_MIXTURE_1D,
        "means": dist.mean.tolist(),
        "variances": dist.cov.tolist(),
        "weights": dist.weights.tolist(),
    }


def oracle_from_config(cfg: dict) -> OracleDistribution:
    family = cfg.get("family")
    if family == GAUSSIAN:
        return gaussian_dist(cfg["mean"], cfg["cov"])
    if family == GAUSSIAN_MIXTURE_1D:
        return mixture_dist_1d(cfg["means"], cfg["variances"], cfg["weights"])
    raise ValueError(f"unknown oracle family in config: {family!r}")
