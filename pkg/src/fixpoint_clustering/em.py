"""Gaussian-mixture EM: responsibilities, weighted parameter updates, likelihood.

Accumulations run in fixed row-major order over observations so repeated
runs with the same inputs are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import DimensionMismatchError
from .mixture import Dataset, GaussianComponent, MixtureModel, component_log_densities
from .rng import Pcg32

COLLAPSE_MASS = 1e-12

_COV_MEAN_MODES = ("previous", "updated")
_INIT_METHODS = ("random_points", "spread_quantiles")


@dataclass(frozen=True)
class EmConfig:
    """EM knobs.

    covariance_mean_mode selects which mean the covariance update subtracts:
    ``updated`` (standard EM, monotone likelihood) or ``previous`` (the
    update literally stated with the prior iteration's mean). variance_floor
    is a factor relative to per-dimension data variance; for a constant
    dimension it falls back to the same value taken absolutely.
    """

    covariance_mean_mode: str = "updated"
    variance_floor: float = 1e-8
    seed: int = 0
    init_method: str = "spread_quantiles"

    def __post_init__(self):
        if self.covariance_mean_mode not in _COV_MEAN_MODES:
            raise ValueError(f"covariance_mean_mode must be one of {_COV_MEAN_MODES}")
        if self.init_method not in _INIT_METHODS:
            raise ValueError(f"init_method must be one of {_INIT_METHODS}")
        if not self.variance_floor > 0.0:
            raise ValueError("variance_floor must be > 0")


@dataclass(frozen=True)
class ResponsibilityMatrix:
    """N x G posterior probabilities; every row sums to 1."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        if np.any(vals < 0.0) or np.any(vals > 1.0):
            raise ValueError("responsibilities must lie in [0, 1]")
        row_err = np.abs(vals.sum(axis=1) - 1.0)
        if np.any(row_err > 1e-10):
            raise ValueError(f"responsibility rows must sum to 1 (max error {row_err.max():.3e})")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class MStepResult:
    model: MixtureModel
    collapsed: tuple[int, ...]


@dataclass(frozen=True)
class EmStepResult:
    model: MixtureModel
    loglik: float
    collapsed: tuple[int, ...]


def variance_floors(data: Dataset, config: EmConfig) -> np.ndarray:
    """Absolute per-dimension floor on covariance diagonals."""
    var = data.variances()
    floors = config.variance_floor * var
    floors[var <= 0.0] = config.variance_floor
    return floors


def _log_weighted(data: Dataset, model: MixtureModel) -> np.ndarray:
    if data.dims != model.dims:
        raise DimensionMismatchError(f"data has {data.dims} dims, model has {model.dims}")
    log_phi = component_log_densities(data.points, model)
    with np.errstate(divide="ignore"):
        log_pi = np.log(model.weights)
    return log_phi + log_pi


def responsibilities(data: Dataset, model: MixtureModel) -> ResponsibilityMatrix:
    """Posterior probability of each component for each observation.

    Computed entirely in log space with log-sum-exp normalization, so rows
    stay valid even where every raw density underflows.
    """
    log_w = _log_weighted(data, model)
    log_norm = logsumexp(log_w, axis=1, keepdims=True)
    return ResponsibilityMatrix(np.exp(log_w - log_norm))


def log_likelihood(data: Dataset, model: MixtureModel) -> float:
    """Total log mixture density of the data.

    Per-point log-sum-exp and the final total both use math.fsum, making the
    value exactly invariant under component permutation and exactly additive
    over dataset concatenation.
    """
    log_w = _log_weighted(data, model)
    per_point = []
    for row in log_w:
        m = row.max()
        if m == -np.inf:
            per_point.append(-math.inf)
            continue
        per_point.append(m + math.log(math.fsum(math.exp(v - m) for v in row)))
    return math.fsum(per_point)


def m_step(data: Dataset, resp: ResponsibilityMatrix, prev_model: MixtureModel,
           config: EmConfig) -> MStepResult:
    """Weighted parameter update from a responsibility matrix.

    Components whose total responsibility mass falls below 1e-12 are
    reported in ``collapsed`` and keep their previous mean/covariance (their
    weight still reflects the vanishing mass); dropping them is the caller's
    call.
    """
    r = resp.values
    n, g_count = r.shape
    if n != data.n or g_count != prev_model.g_count:
        raise DimensionMismatchError("responsibility shape does not match data/model")
    floors = variance_floors(data, config)
    pts = data.points
    masses = r.sum(axis=0)
    components = []
    collapsed = []
    for g in range(g_count):
        prev = prev_model.components[g]
        weight = float(masses[g]) / n
        if masses[g] < COLLAPSE_MASS:
            collapsed.append(g)
            components.append(GaussianComponent(weight, prev.mean, prev.covariance))
            continue
        rg = r[:, g]
        mean = (rg[:, None] * pts).sum(axis=0) / masses[g]
        center = prev.mean if config.covariance_mean_mode == "previous" else mean
        diff = pts - center
        cov = (rg[:, None] * diff).T @ diff / masses[g]
        cov = 0.5 * (cov + cov.T)
        diag = np.diag(cov).copy()
        np.fill_diagonal(cov, np.maximum(diag, floors))
        components.append(GaussianComponent(weight, mean, cov))
    return MStepResult(MixtureModel(tuple(components)), tuple(collapsed))


def initialize_model(data: Dataset, g: int, config: EmConfig) -> MixtureModel:
    """Starting mixture: equal weights, diagonal data covariance, spread means.

    ``spread_quantiles`` places means on per-dimension quantiles (the sample
    mean when g == 1); ``random_points`` picks g distinct observation rows
    with the seeded generator.
    """
    if g < 1:
        raise ValueError("need at least one component")
    if g > data.n:
        raise ValueError(f"cannot initialize {g} components from {data.n} observations")
    if config.init_method == "random_points":
        rng = Pcg32(config.seed)
        rows = rng.choose_distinct(data.n, g)
        means = [data.points[i] for i in rows]
    elif g == 1:
        means = [data.points.mean(axis=0)]
    else:
        levels = [(2 * i + 1) / (2 * g) for i in range(g)]
        means = [np.quantile(data.points, q, axis=0) for q in levels]
    cov = np.diag(np.maximum(data.variances(), variance_floors(data, config)))
    weight = 1.0 / g
    return MixtureModel(tuple(GaussianComponent(weight, m, cov) for m in means))


def em_fit_step(data: Dataset, model: MixtureModel, config: EmConfig) -> EmStepResult:
    """One full EM iteration; the returned log-likelihood is of the new model."""
    resp = responsibilities(data, model)
    result = m_step(data, resp, model, config)
    return EmStepResult(result.model, log_likelihood(data, result.model), result.collapsed)
