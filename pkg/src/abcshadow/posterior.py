"""Chain post-processing: quantile tables, marginal kernel density MAP
estimates, and the parametric-bootstrap error estimates for fitted models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import as_generator
from .models import (
    GaussianModel,
    ModelSpec,
    in_domain,
    param_names,
    sample_gaussian_exact,
    stat_names,
)

__all__ = [
    "PosteriorSummary",
    "KdeResult",
    "ErrorEstimates",
    "DEFAULT_QUANTILES",
    "summarize",
    "marginal_kde",
    "kde_map",
    "error_estimates",
]

DEFAULT_QUANTILES = (0.05, 0.25, 0.50, 0.75, 0.95)


@dataclass
class PosteriorSummary:
    """Per-parameter posterior table: quantiles, mean, and marginal-KDE MAP.

    quantiles has one row per probability in quantile_probs and one column
    per parameter. bandwidths holds the KDE bandwidth used per marginal
    (NaN when the KDE route was not taken, 0 for a degenerate marginal).
    """

    param_names: tuple[str, ...]
    quantile_probs: tuple[float, ...]
    quantiles: np.ndarray
    mean: np.ndarray
    map_estimate: np.ndarray
    bandwidths: np.ndarray
    n_samples: int

    def row(self, name: str) -> dict[str, float]:
        j = self.param_names.index(name)
        out = {f"q{int(round(100 * p))}": float(self.quantiles[i, j])
               for i, p in enumerate(self.quantile_probs)}
        out["mean"] = float(self.mean[j])
        out["map"] = float(self.map_estimate[j])
        return out


@dataclass
class KdeResult:
    """One marginal Gaussian-kernel density estimate on a regular grid."""

    grid: np.ndarray
    density: np.ndarray
    bandwidth: float
    mode: float


def _as_samples(trace, param_names):
    samples = np.asarray(getattr(trace, "samples", trace), dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.ndim != 2:
        raise ValueError("samples must be a 2-D array, one row per draw")
    if param_names is None:
        param_names = getattr(trace, "param_names", None)
    if param_names is None:
        param_names = tuple(f"param_{j}" for j in range(samples.shape[1]))
    param_names = tuple(param_names)
    if len(param_names) != samples.shape[1]:
        raise ValueError("one name per parameter column is required")
    return samples, param_names


def silverman_bandwidth(x: np.ndarray) -> float:
    """1.06 * sd * n^(-1/5)."""
    n = x.size
    if n < 2:
        return 0.0
    return 1.06 * float(np.std(x, ddof=1)) * n ** (-0.2)


def marginal_kde(x, grid_points: int = 512, bandwidth: float | None = None) -> KdeResult:
    """Gaussian-kernel density of one marginal on a regular grid.

    The grid spans the sample range, so the reported mode always lies inside
    the sample hull. A zero-variance marginal collapses to a single grid
    point carrying all mass.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 10:
        raise ValueError("kernel density estimation needs at least 10 samples")
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    h = silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    if h < 0:
        raise ValueError("bandwidth must be non-negative")
    lo = float(x.min())
    hi = float(x.max())
    if h == 0.0 or lo == hi:
        v = float(np.median(x))
        return KdeResult(np.array([v]), np.array([math.inf]), 0.0, v)
    grid = np.linspace(lo, hi, grid_points)
    density = np.empty(grid_points)
    norm = 1.0 / (x.size * h * math.sqrt(2.0 * math.pi))
    step = max(1, int(2e6 // max(x.size, 1)))
    for i in range(0, grid_points, step):
        z = (grid[i:i + step, None] - x[None, :]) / h
        density[i:i + step] = norm * np.exp(-0.5 * z * z).sum(axis=1)
    mode = float(grid[int(np.argmax(density))])
    return KdeResult(grid, density, h, mode)


def kde_map(samples, grid_points: int = 512) -> np.ndarray:
    """MAP estimate assembled from per-marginal KDE modes."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    return np.array([marginal_kde(samples[:, j], grid_points).mode
                     for j in range(samples.shape[1])])


def summarize(trace, qs=DEFAULT_QUANTILES, param_names=None,
              grid_points: int = 512) -> PosteriorSummary:
    """Posterior table of a trace (or a plain samples array).

    Quantiles interpolate linearly between order statistics. The MAP comes
    from per-marginal kernel densities when at least 10 samples are
    available and falls back to the median below that.
    """
    samples, param_names = _as_samples(trace, param_names)
    n = samples.shape[0]
    if n < 2:
        raise ValueError("summaries need at least 2 samples")
    qs = tuple(float(q) for q in qs)
    if any(q < 0 or q > 1 for q in qs):
        raise ValueError("quantile probabilities must lie in [0, 1]")
    quants = np.quantile(samples, qs, axis=0)
    mean = samples.mean(axis=0)
    k = samples.shape[1]
    bandwidths = np.full(k, np.nan)
    map_est = np.empty(k)
    for j in range(k):
        if n >= 10:
            kde = marginal_kde(samples[:, j], grid_points)
            map_est[j] = kde.mode
            bandwidths[j] = kde.bandwidth
        else:
            map_est[j] = float(np.median(samples[:, j]))
    return PosteriorSummary(param_names, qs, quants, mean, map_est,
                            bandwidths, n)


@dataclass
class ErrorEstimates:
    """Estimation errors at a fitted parameter, by forward simulation.

    covariance is the empirical covariance of the sufficient statistics over
    n_sim simulated datasets; asymptotic_sd = sqrt(diag(covariance^-1)) (the
    inverse observed Fisher information of the exponential family);
    mc_sd propagates the batch-means long-run covariance of the statistic
    sequence through the same inverse, divided by n_sim. The errors live in
    the natural parametrization, which is the model parametrization itself
    for the point-process models (so rows are keyed by parameter name).
    """

    param_names: tuple[str, ...]
    stat_names: tuple[str, ...]
    covariance: np.ndarray
    asymptotic_sd: np.ndarray
    mc_sd: np.ndarray
    n_sim: int
    n_batches: int


def error_estimates(
    model: ModelSpec,
    theta_hat,
    n_sim: int = 1000,
    rng=None,
    pp_config=None,
    sweeps_between: int | None = None,
) -> ErrorEstimates:
    """Simulate at theta_hat and derive asymptotic and Monte Carlo errors.

    Gaussian datasets are exact independent draws; point patterns come from
    one continued MH chain, recorded every sweeps_between steps (default:
    the model's auxiliary-refresh default) after a 10x warm-up, which is
    what the batch-means variance in mc_sd accounts for. Raises when the
    statistic covariance is singular, naming the deficient direction.
    """
    from .mcmc import PPSamplerConfig, _make_state, _move_params, \
        _run_pp_steps, default_aux_sweeps

    theta_hat = np.asarray(theta_hat, dtype=float)
    if not in_domain(model, theta_hat):
        raise ValueError("theta_hat outside the model domain")
    if n_sim < 4:
        raise ValueError("n_sim must be at least 4")
    gen = as_generator(rng if rng is not None else 0)
    names = stat_names(model)
    k = len(names)
    stats = np.empty((n_sim, k))
    if isinstance(model, GaussianModel):
        for i in range(n_sim):
            x = sample_gaussian_exact(model, theta_hat, gen)
            stats[i, 0] = x.sum()
            stats[i, 1] = x @ x
    else:
        cfg = pp_config or PPSamplerConfig()
        s = sweeps_between if sweeps_between is not None else default_aux_sweeps(model)
        if s < 1:
            raise ValueError("sweeps_between must be positive")
        state = _make_state(model, None)
        move_r, jitter = _move_params(model, cfg)
        eta = theta_hat.tolist()
        _run_pp_steps(state, eta, 10 * s, cfg, gen, move_r, jitter)
        for i in range(n_sim):
            _run_pp_steps(state, eta, s, cfg, gen, move_r, jitter)
            stats[i] = state.statistics()

    cov = np.cov(stats.T, ddof=1)
    cov = np.atleast_2d(cov)
    eigval, eigvec = np.linalg.eigh(cov)
    scale = max(float(eigval[-1]), 1e-300)
    if eigval[0] <= 1e-12 * scale:
        direction = eigvec[:, 0]
        worst = names[int(np.argmax(np.abs(direction)))]
        raise ValueError(
            "singular statistic covariance; no variation along "
            f"{direction.round(6).tolist()} (dominated by {worst!r})")
    inv_cov = np.linalg.inv(cov)
    asym = np.sqrt(np.diag(inv_cov))
    n_batches = int(math.floor(math.sqrt(n_sim)))
    batch = n_sim // n_batches
    used = stats[: n_batches * batch].reshape(n_batches, batch, k)
    bmeans = used.mean(axis=1)
    vhat = batch * np.atleast_2d(np.cov(bmeans.T, ddof=1))
    mc = np.sqrt(np.diag(inv_cov @ vhat @ inv_cov) / n_sim)
    return ErrorEstimates(param_names(model), names, cov, asym, mc,
                          n_sim, n_batches)
