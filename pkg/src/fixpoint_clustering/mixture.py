"""Gaussian mixture primitives: datasets, components, densities, validation.

All types here are immutable after construction (arrays are marked
read-only) and all operations are pure functions, so everything can be
shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatchError

_LOG_2PI = math.log(2.0 * math.pi)


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """N observations of L real coordinates.

    Rejects empty data and non-finite entries at construction.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise DimensionMismatchError(f"expected an N x L matrix, got ndim={pts.ndim}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("dataset needs at least one observation and one dimension")
        if not np.all(np.isfinite(pts)):
            raise ValueError("dataset contains non-finite entries")
        object.__setattr__(self, "points", _frozen_array(pts))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dims(self) -> int:
        return self.points.shape[1]

    def ranges(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-dimension (min, max) envelope: the axis-aligned hull of the data."""
        return self.points.min(axis=0), self.points.max(axis=0)

    def variances(self) -> np.ndarray:
        """Per-dimension population variance (ddof=0)."""
        return self.points.var(axis=0)


@dataclass(frozen=True)
class GaussianComponent:
    """One weighted Gaussian: mixing weight, mean vector, covariance matrix."""

    weight: float
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = _frozen_array(np.atleast_1d(self.mean))
        cov = _frozen_array(np.atleast_2d(self.covariance))
        if mean.ndim != 1:
            raise DimensionMismatchError("component mean must be a vector")
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatchError(
                f"covariance shape {cov.shape} does not match mean length {mean.size}"
            )
        if not (np.isfinite(self.weight) and np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValueError("component parameters must be finite")
        object.__setattr__(self, "weight", float(self.weight))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def dims(self) -> int:
        return self.mean.size

    @property
    def marginal_sigmas(self) -> np.ndarray:
        """Per-dimension marginal standard deviations sqrt(diag(covariance))."""
        return np.sqrt(np.diag(self.covariance))

    def _cholesky(self) -> np.ndarray:
        # Cached lower-triangular factor; raises LinAlgError for non-PD input.
        cached = self.__dict__.get("_chol")
        if cached is None:
            cached = np.linalg.cholesky(self.covariance)
            object.__setattr__(self, "_chol", cached)
        return cached

    def log_density(self, points: np.ndarray) -> np.ndarray:
        """Log of the (unweighted) Gaussian density at each row of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dims:
            raise DimensionMismatchError(
                f"points have {pts.shape[1]} dims, component has {self.dims}"
            )
        chol = self._cholesky()
        diff = (pts - self.mean).T
        z = solve_triangular(chol, diff, lower=True)
        log_det = 2.0 * np.sum(np.log(np.diag(chol)))
        return -0.5 * (self.dims * _LOG_2PI + log_det + np.sum(z * z, axis=0))


@dataclass(frozen=True)
class MixtureModel:
    """Ordered list of Gaussian components forming a finite mixture."""

    components: tuple[GaussianComponent, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a mixture needs at least one component")
        dims = comps[0].dims
        for i, c in enumerate(comps):
            if c.dims != dims:
                raise DimensionMismatchError(f"component {i} has {c.dims} dims, expected {dims}")
        object.__setattr__(self, "components", comps)

    @property
    def g_count(self) -> int:
        return len(self.components)

    @property
    def dims(self) -> int:
        return self.components[0].dims

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])


@dataclass(frozen=True)
class Violation:
    """One broken model invariant; ``component`` is None for model-level checks."""

    component: int | None
    invariant: str
    detail: str


def _check_point(x, model: MixtureModel) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1 or x.size != model.dims:
        raise DimensionMismatchError(f"point of length {x.size} vs model dims {model.dims}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point contains non-finite entries")
    return x


def component_log_densities(points: np.ndarray, model: MixtureModel) -> np.ndarray:
    """(N, G) matrix of unweighted per-component log densities."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != model.dims:
        raise DimensionMismatchError(f"points have {pts.shape[1]} dims, model has {model.dims}")
    out = np.empty((pts.shape[0], model.g_count))
    for g, comp in enumerate(model.components):
        out[:, g] = comp.log_density(pts)
    return out


def component_density(x, component: GaussianComponent) -> float:
    """Unweighted Gaussian density of one component at a single point."""
    return float(np.exp(component.log_density(np.atleast_2d(x))[0]))


def mixture_density(x, model: MixtureModel) -> float:
    """Mixture density sum_g weight_g * phi_g(x).

    Each term is computed in log space and exponentiated at the boundary;
    the final sum uses math.fsum, so the value is exactly invariant under
    permutation of the component list.
    """
    x = _check_point(x, model)
    logs = component_log_densities(x[None, :], model)[0]
    terms = [math.exp(lg + math.log(c.weight)) if c.weight > 0.0 else 0.0
             for lg, c in zip(logs, model.components)]
    return math.fsum(terms)


def interpretation_degree(x, model: MixtureModel) -> tuple[float, int]:
    """Best single-component (unweighted) density at x and its component index.

    Ties break to the smallest index. The weight plays no role here: this
    measures how well the best local component alone explains the point.
    """
    x = _check_point(x, model)
    logs = component_log_densities(x[None, :], model)[0]
    best = 0
    for g in range(1, logs.size):
        if logs[g] > logs[best]:
            best = g
    return float(math.exp(logs[best])), best


def validate_model(model: MixtureModel, variance_floor=None) -> list[Violation]:
    """Check all model invariants, returning violations as data (never raising).

    ``variance_floor`` is an optional absolute per-dimension lower bound on
    covariance diagonals (scalar or length-L array); when None the floor
    check is skipped.
    """
    violations: list[Violation] = []
    total = math.fsum(c.weight for c in model.components)
    if abs(total - 1.0) > 1e-12:
        violations.append(Violation(None, "weight-sum", f"weights sum to {total!r}, expected 1"))
    floor = None
    if variance_floor is not None:
        floor = np.broadcast_to(np.asarray(variance_floor, dtype=float), (model.dims,))
    for g, comp in enumerate(model.components):
        if not comp.weight > 0.0:
            violations.append(Violation(g, "weight-positive", f"weight {comp.weight!r} must be > 0"))
        cov = comp.covariance
        scale = max(1.0, float(np.max(np.abs(cov))))
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12 * scale):
            violations.append(Violation(g, "covariance-symmetric", "covariance is not symmetric"))
        if floor is not None:
            diag = np.diag(cov)
            low = np.flatnonzero(diag < floor)
            if low.size:
                violations.append(Violation(
                    g, "variance-floor",
                    f"diagonal entries {low.tolist()} below floor"))
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            violations.append(Violation(g, "positive-definite", "covariance is not positive definite"))
    return violations
