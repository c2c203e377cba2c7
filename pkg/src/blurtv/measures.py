"""Samples, empirical measures, half-sample splits, and smoothed densities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import Kernel, check_bandwidth

__all__ = [
    "Sample",
    "EmpiricalMeasure",
    "SplitPair",
    "SampleIOError",
    "as_points",
    "split_halves",
    "smoothed_density",
    "smoothed_density_batch",
    "load_sample",
]


class SampleIOError(Exception):
    """A sample file could not be parsed; carries the offending line number."""


def as_points(points, dim: int | None = None) -> np.ndarray:
    """Coerce input to an (n, d) float array of finite points."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError(f"points must form a non-empty (n, d) array, got shape {pts.shape}")
    if dim is not None and pts.shape[1] != dim:
        raise ValueError(f"points have dimension {pts.shape[1]}, expected {dim}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must all be finite")
    return pts


@dataclass(frozen=True)
class Sample:
    """An ordered iid sample of points in R^d with a free-form label."""

    points: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "points", as_points(self.points))
        self.points.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniform distribution on a finite point set."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", as_points(self.points))
        self.points.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def of(cls, sample: "Sample | EmpiricalMeasure | np.ndarray") -> "EmpiricalMeasure":
        if isinstance(sample, EmpiricalMeasure):
            return sample
        if isinstance(sample, Sample):
            return cls(sample.points)
        return cls(sample)


@dataclass(frozen=True)
class SplitPair:
    """First/second half-sample empirical measures, split by index order."""

    first: EmpiricalMeasure
    second: EmpiricalMeasure


def split_halves(sample: Sample | EmpiricalMeasure) -> SplitPair:
    """Split into the first floor(n/2) and the remaining ceil(n/2) points.

    The split is deterministic in index order; callers wanting a random
    split shuffle the sample first with their own seeded generator.
    """
    measure = EmpiricalMeasure.of(sample)
    n = measure.n
    if n < 2:
        raise ValueError(f"cannot split a sample of size {n}; need n >= 2")
    half = n // 2
    return SplitPair(EmpiricalMeasure(measure.points[:half]), EmpiricalMeasure(measure.points[half:]))


def smoothed_density_batch(
    measure: EmpiricalMeasure, kernel: Kernel, h: float, z: np.ndarray
) -> np.ndarray:
    """Kernel-density estimate of the measure at each row of ``z``.

    ``z`` may be (k,) in dimension 1 or (k, d) in general; returns (k,).
    Far-away contributions underflow to 0, which is harmless for the TV
    integrands this feeds.
    """
    h = check_bandwidth(h)
    pts = measure.points
    d = measure.dim
    z = np.asarray(z, dtype=float)
    if z.ndim == 1:
        if d != 1:
            raise ValueError(f"flat evaluation points require dimension 1, measure has {d}")
        z = z[:, None]
    if z.shape[1] != d:
        raise ValueError(f"evaluation points have dimension {z.shape[1]}, measure has {d}")
    if kernel.dim != d:
        raise ValueError(f"kernel dimension {kernel.dim} does not match data dimension {d}")

    if kernel.is_gaussian:
        # ||z - x||^2 via the expanded form; one matmul dominates the cost.
        sq = (
            np.sum(z * z, axis=1)[:, None]
            - 2.0 * (z @ pts.T)
            + np.sum(pts * pts, axis=1)[None, :]
        )
        np.maximum(sq, 0.0, out=sq)
        log_norm = 0.5 * d * np.log(2.0 * np.pi)
        comp = np.exp(-0.5 * sq / (h * h) - log_norm)
        return comp.sum(axis=1) / (measure.n * h**d)

    means = np.asarray(kernel.means)
    sds = np.asarray(kernel.sds)
    w = np.asarray(kernel.weights)
    # Mixture KDE: components centered at x_i + h*m_j with sd h*s_j.
    centers = (pts[:, 0][:, None] + h * means[None, :]).ravel()
    scales = np.broadcast_to(h * sds[None, :], (measure.n, means.size)).ravel()
    wts = np.broadcast_to(w[None, :] / measure.n, (measure.n, means.size)).ravel()
    t = (z[:, 0][:, None] - centers[None, :]) / scales[None, :]
    comp = np.exp(-0.5 * t * t) / (np.sqrt(2.0 * np.pi) * scales[None, :])
    return comp @ wts


def smoothed_density(measure: EmpiricalMeasure, kernel: Kernel, h: float, z) -> float:
    """Smoothed (KDE) density of the empirical measure at a single point."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    return float(smoothed_density_batch(measure, kernel, h, z[None, :])[0])


def load_sample(path, dim: int, label: str = "") -> Sample:
    """Read a sample from CSV: one point per line, ``dim`` comma-separated reals.

    No header; UTF-8; LF or CRLF. Parse failures raise SampleIOError naming
    the line; non-finite values raise ValueError.
    """
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8", newline=None) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != dim:
                raise SampleIOError(
                    f"{path}: line {lineno}: expected {dim} fields, found {len(fields)}"
                )
            try:
                row = [float(x) for x in fields]
            except ValueError:
                raise SampleIOError(f"{path}: line {lineno}: could not parse {line!r}") from None
            if not all(np.isfinite(v) for v in row):
                raise ValueError(f"{path}: line {lineno}: non-finite value in {line!r}")
            rows.append(row)
    if not rows:
        raise SampleIOError(f"{path}: file contains no data lines")
    return Sample(np.asarray(rows, dtype=float), label=label)
