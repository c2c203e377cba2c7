"""Blurred total variation distance: estimation, confidence bounds, simulation.

The blurred TV distance between two distributions is the total variation
distance after both are convolved with a common scaled kernel. Unlike raw
TV, it supports assumption-free finite-sample inference: this package
implements the estimators (exact 1-D quadrature and Monte Carlo), the full
family of distribution-free lower/upper confidence bounds, closed-form
oracles for Gaussian settings, and a reproducible simulation harness.
"""

from .bounds import (
    BoundResult,
    BoundSpec,
    VarianceProxy,
    bounds_adaptive,
    bounds_combined,
    bounds_monte_carlo,
    bounds_naive,
    bounds_uniform,
    compute_bound,
    convergence_bound,
    epsilon_B,
    epsilon_nm,
    r_constants,
    variance_proxy,
)
from .estimator import (
    BandwidthGrid,
    MonteCarloPlan,
    blurred_tv_monte_carlo,
    blurred_tv_quadrature_1d,
    geometric_grid,
    monotonized_lo,
    monotonized_up,
)
from .kernels import (
    Kernel,
    density,
    gaussian_kernel,
    gaussian_mixture_kernel_1d,
    kernel_from_config,
    kernel_from_spec,
    sample,
    scaled_density,
    shift_modulus,
    trimodal_kernel,
)
from .measures import (
    EmpiricalMeasure,
    Sample,
    SampleIOError,
    load_sample,
    smoothed_density,
    split_halves,
)
from .oracle import (
    OracleDistribution,
    gaussian_dist,
    mixture_dist_1d,
    oracle_blurred_tv_gaussian,
    oracle_blurred_tv_quadrature_1d,
    oracle_tv_gaussian,
    oracle_tv_quadrature_1d,
    sample_oracle,
    spiked_gaussian_pair,
)
from .quadrature import QuadratureError
from .rng import substream

__version__ = "0.1.0"
