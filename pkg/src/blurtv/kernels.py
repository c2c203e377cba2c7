"""Smoothing kernels: densities, sampling, bandwidth scaling, shift modulus.

Two families are supported: the standard Gaussian density in any dimension,
and finite Gaussian mixtures on the real line (enough to cover multimodal
smoothing while keeping convolutions available in closed form).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .quadrature import integrate_adaptive

__all__ = [
    "Kernel",
    "gaussian_kernel",
    "gaussian_mixture_kernel_1d",
    "trimodal_kernel",
    "check_bandwidth",
    "density",
    "scaled_density",
    "sample",
    "sample_batch",
    "shift_modulus",
    "support_radius",
    "kernel_from_config",
    "kernel_to_config",
    "kernel_from_spec",
]

GAUSSIAN = "gaussian"
GAUSSIAN_MIXTURE_1D = "gaussian_mixture_1d"

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class Kernel:
    """A probability density on R^d used for smoothing.

    For the Gaussian family only ``dim`` is used. For the 1-D mixture
    family, ``means``, ``weights`` and ``sds`` describe the components;
    weights must be positive and sum to 1.
    """

    dim: int
    family: str
    means: tuple[float, ...] = field(default=())
    weights: tuple[float, ...] = field(default=())
    sds: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"kernel dimension must be >= 1, got {self.dim}")
        if self.family == GAUSSIAN:
            if self.means or self.weights or self.sds:
                raise ValueError("gaussian kernel takes no mixture parameters")
        elif self.family == GAUSSIAN_MIXTURE_1D:
            if self.dim != 1:
                raise ValueError("mixture kernels are supported in dimension 1 only")
            k = len(self.means)
            if k == 0 or len(self.weights) != k or len(self.sds) != k:
                raise ValueError("means, weights, sds must be non-empty and equally long")
            w = np.asarray(self.weights, dtype=float)
            if np.any(w <= 0):
                raise ValueError("mixture weights must be positive")
            if abs(float(w.sum()) - 1.0) > 1e-12:
                raise ValueError(f"mixture weights must sum to 1, got {w.sum()!r}")
            if np.any(np.asarray(self.sds, dtype=float) <= 0):
                raise ValueError("mixture standard deviations must be positive")
        else:
            raise ValueError(f"unknown kernel family {self.family!r}")

    @property
    def is_gaussian(self) -> bool:
        return self.family == GAUSSIAN


def gaussian_kernel(dim: int = 1) -> Kernel:
    """Standard Gaussian kernel in R^dim."""
    return Kernel(dim=dim, family=GAUSSIAN)


def gaussian_mixture_kernel_1d(means, weights, sds) -> Kernel:
    """Finite Gaussian-mixture kernel on the real line."""
    return Kernel(
        dim=1,
        family=GAUSSIAN_MIXTURE_1D,
        means=tuple(float(m) for m in means),
        weights=tuple(float(w) for w in weights),
        sds=tuple(float(s) for s in sds),
    )


def trimodal_kernel() -> Kernel:
    """The symmetric trimodal mixture (1/3)N(-4,1) + (1/3)N(0,1) + (1/3)N(4,1)."""
    third = 1.0 / 3.0
    return gaussian_mixture_kernel_1d([-4.0, 0.0, 4.0], [third, third, third], [1.0, 1.0, 1.0])


def check_bandwidth(h: float) -> float:
    """Validate a bandwidth: strictly positive and finite."""
    h = float(h)
    if not np.isfinite(h) or h <= 0:
        raise ValueError(f"bandwidth must be a positive real, got {h!r}")
    return h


def _as_point(kernel: Kernel, u) -> np.ndarray:
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.ndim != 1 or u.size != kernel.dim:
        raise ValueError(f"point has dimension {u.size}, kernel has dimension {kernel.dim}")
    return u


def density_batch_1d(kernel: Kernel, z: np.ndarray) -> np.ndarray:
    """Evaluate a 1-D kernel density at every abscissa in ``z``."""
    z = np.asarray(z, dtype=float)
    if kernel.is_gaussian:
        return np.exp(-0.5 * z * z - 0.5 * _LOG_2PI)
    means = np.asarray(kernel.means)
    sds = np.asarray(kernel.sds)
    w = np.asarray(kernel.weights)
    t = (z[..., None] - means) / sds
    comp = np.exp(-0.5 * t * t - 0.5 * _LOG_2PI) / sds
    return comp @ w


def density(kernel: Kernel, u) -> float:
    """Kernel density at a point of R^d."""
    u = _as_point(kernel, u)
    if kernel.is_gaussian:
        return float(np.exp(-0.5 * float(u @ u) - 0.5 * kernel.dim * _LOG_2PI))
    return float(density_batch_1d(kernel, u[0]))


def scaled_density(kernel: Kernel, h: float, u) -> float:
    """Density of the bandwidth-h rescaling: h^{-d} times the density at u/h."""
    h = check_bandwidth(h)
    u = _as_point(kernel, u)
    return density(kernel, u / h) / h**kernel.dim


def sample(kernel: Kernel, rng: np.random.Generator) -> np.ndarray:
    """One draw from the kernel, as a (d,) vector."""
    return sample_batch(kernel, rng, 1)[0]


def sample_batch(kernel: Kernel, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` iid draws from the kernel, as a (size, d) array."""
    if kernel.is_gaussian:
        return rng.standard_normal((size, kernel.dim))
    means = np.asarray(kernel.means)
    sds = np.asarray(kernel.sds)
    comp = rng.choice(len(means), size=size, p=np.asarray(kernel.weights))
    z = rng.standard_normal(size)
    return (means[comp] + sds[comp] * z)[:, None]


def support_radius(kernel: Kernel) -> float:
    """Radius beyond which the kernel carries negligible mass (tail proxy)."""
    if kernel.is_gaussian:
        return 1.0
    return float(np.max(np.abs(kernel.means)) + 10.0 * np.max(kernel.sds))


def shift_modulus(kernel: Kernel, v) -> float:
    """Total variation distance between the kernel and its translate by v.

    For the Gaussian kernel this is 2*Phi(||v||/2) - 1 in closed form; for
    1-D mixtures it is computed by adaptive quadrature of the positive part
    of the density difference, to absolute tolerance 1e-8.
    """
    v = _as_point(kernel, v)
    if kernel.is_gaussian:
        r = float(np.linalg.norm(v))
        return float(np.clip(2.0 * ndtr(0.5 * r) - 1.0, 0.0, 1.0))

    shift = float(v[0])
    if shift == 0.0:
        return 0.0
    rad = support_radius(kernel)
    lo = min(-rad, -rad + shift)
    hi = max(rad, rad + shift)
    means = np.asarray(kernel.means)
    breaks = np.unique(np.concatenate([means, means + shift]))

    def positive_part(z: np.ndarray) -> np.ndarray:
        diff = density_batch_1d(kernel, z) - density_batch_1d(kernel, z - shift)
        return np.maximum(diff, 0.0)

    val = integrate_adaptive(positive_part, lo, hi, breakpoints=breaks, tol=1e-8)
    return float(np.clip(val, 0.0, 1.0))


def shift_modulus_gaussian_batch(dist_over_h: np.ndarray) -> np.ndarray:
    """Gaussian shift modulus for a batch of ||v|| values (vectorized)."""
    return 2.0 * ndtr(0.5 * np.asarray(dist_over_h, dtype=float)) - 1.0


def kernel_to_config(kernel: Kernel) -> dict:
    """JSON-friendly description, inverse of :func:`kernel_from_config`."""
    if kernel.is_gaussian:
        return {"family": GAUSSIAN, "dim": kernel.dim}
    return {
        "family": GAUSSIAN_MIXTURE_1D,
        "means": list(kernel.means),
        "weights": list(kernel.weights),
        "sds": list(kernel.sds),
    }


def kernel_from_config(cfg: dict) -> Kernel:
    """Build a kernel from its config-file description."""
    family = cfg.get("family")
    if family == GAUSSIAN:
        return gaussian_kernel(int(cfg.get("dim", 1)))
    if family == GAUSSIAN_MIXTURE_1D:
        return gaussian_mixture_kernel_1d(cfg["means"], cfg["weights"], cfg["sds"])
    raise ValueError(f"unknown kernel family in config: {family!r}")


def kernel_from_spec(spec: str, dim: int) -> Kernel:
    """Parse a CLI kernel spec: ``gaussian`` or ``mix:<means>/<weights>/<sds>``.

    The three mixture fields are comma-separated reals, e.g.
    ``mix:-4,0,4/0.3333333333333333,0.3333333333333333,0.3333333333333334/1,1,1``.
    """
    spec = spec.strip()
    if spec == GAUSSIAN:
        return gaussian_kernel(dim)
    if spec.startswith("mix:"):
        if dim != 1:
            raise ValueError("mixture kernels require --dim 1")
        body = spec[len("mix:"):]
        parts = body.split("/")
        if len(parts) != 3:
            raise ValueError("mixture spec must be mix:<means>/<weights>/<sds>")
        try:
            means, weights, sds = ([float(x) for x in p.split(",")] for p in parts)
        except ValueError as exc:
            raise ValueError(f"could not parse mixture spec {spec!r}: {exc}") from None
        return gaussian_mixture_kernel_1d(means, weights, sds)
    raise ValueError(f"unknown kernel spec {spec!r}; expected 'gaussian' or 'mix:...'")
