"""Exponential-family model specifications and their sufficient statistics.

Every model here has an unnormalized density of the form
``exp(<t(data), eta(theta)>)`` with an intractable normalizing constant
(analytically known only in the Gaussian case). The shadow sampler, the
auxiliary-variable baselines and the posterior post-processing all interact
with models exclusively through ``natural_parameters``,
``sufficient_statistics`` and ``log_unnormalized_density``, so adding a model
means adding one dataclass plus its branches below.

Models
------
Gaussian : m iid real draws, theta = (mean, variance),
    t = (sum, sum of squares), eta = (mean/variance, -1/(2 variance)).
Strauss : unmarked pairwise-interaction point process,
    theta = (log_beta, log_gamma) with log_gamma <= 0,
    t = (point count, pairs closer than r).
Candy : marked segment process (orientation marks, fixed length),
    theta weights the doubly-connected / singly-connected / free segment
    counts and the close non-orthogonal pair count.
AreaInteraction : unmarked point process, theta = (log_beta, log_gamma),
    t = (point count, -union-of-disks area in disk units); log_gamma > 0
    favours clustering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DomainError, PointPattern, Window, as_generator
from .geometry import area_statistic, candy_counts, pair_count

__all__ = [
    "GaussianModel",
    "StraussModel",
    "CandyModel",
    "AreaInteractionModel",
    "ModelSpec",
    "natural_parameters",
    "sufficient_statistics",
    "log_unnormalized_density",
    "gaussian_log_norm_const",
    "sample_gaussian_exact",
    "in_domain",
    "param_names",
    "stat_names",
    "validate_statistics",
    "model_to_dict",
    "model_from_dict",
]


@dataclass(frozen=True)
class GaussianModel:
    """m independent real observations with unknown mean and variance."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("sample size m must be at least 1")


@dataclass(frozen=True)
class StraussModel:
    r: float
    window: Window

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("interaction range r must be positive")


@dataclass(frozen=True)
class CandyModel:
    """Segment process: centres in the window, orientations in [0, pi)."""

    length: float
    r_conn: float
    tau_conn: float
    tau_rej: float
    window: Window
    r_rej: float | None = None

    def __post_init__(self):
        if self.length <= 0 or self.r_conn <= 0:
            raise ValueError("segment length and connection range must be positive")
        if not (0 < self.tau_conn < np.pi / 2 and 0 < self.tau_rej < np.pi / 2):
            raise ValueError("curvature parameters must lie in (0, pi/2)")
        if self.r_rej is None:
            # rejection range defaults to one segment length
            object.__setattr__(self, "r_rej", self.length)
        if self.r_rej <= 0:
            raise ValueError("rejection range must be positive")


@dataclass(frozen=True)
class AreaInteractionModel:
    r: float
    window: Window
    resolution: float | None = None

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("disk radius r must be positive")
        if self.resolution is None:
            object.__setattr__(self, "resolution", self.r / 50.0)
        if not (0 < self.resolution <= self.r / 10.0):
            raise ValueError("resolution must lie in (0, r/10]")


ModelSpec = GaussianModel | StraussModel | CandyModel | AreaInteractionModel


def param_names(model: ModelSpec) -> tuple[str, ...]:
    if isinstance(model, GaussianModel):
        return ("mean", "variance")
    if isinstance(model, (StraussModel, AreaInteractionModel)):
        return ("log_beta", "log_gamma")
    if isinstance(model, CandyModel):
        return ("double", "single", "free", "reject")
    raise TypeError(f"not a model spec: {type(model).__name__}")


def stat_names(model: ModelSpec) -> tuple[str, ...]:
    if isinstance(model, GaussianModel):
        return ("sum", "sum_sq")
    if isinstance(model, StraussModel):
        return ("n_points", "n_close_pairs")
    if isinstance(model, CandyModel):
        return ("n_double", "n_single", "n_free", "n_reject")
    if isinstance(model, AreaInteractionModel):
        return ("n_points", "area_term")
    raise TypeError(f"not a model spec: {type(model).__name__}")


def _check_theta(model: ModelSpec, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    k = len(param_names(model))
    if theta.shape != (k,):
        raise ValueError(f"theta must have shape ({k},), got {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta must be finite")
    return theta


def in_domain(model: ModelSpec, theta) -> bool:
    """Whether the model density is defined at theta."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (len(param_names(model)),) or not np.all(np.isfinite(theta)):
        return False
    if isinstance(model, GaussianModel):
        return theta[1] > 0
    if isinstance(model, StraussModel):
        return theta[1] <= 0
    return True


def natural_parameters(model: ModelSpec, theta) -> np.ndarray:
    """Natural parameter vector eta(theta).

    Identity for the point-process models; the Gaussian maps
    (mean, variance) to (mean/variance, -1/(2 variance)). Raises DomainError
    outside the model domain (variance <= 0, Strauss log_gamma > 0).
    """
    theta = _check_theta(model, theta)
    if isinstance(model, GaussianModel):
        if theta[1] <= 0:
            raise DomainError("gaussian variance must be positive")
        return np.array([theta[0] / theta[1], -0.5 / theta[1]])
    if isinstance(model, StraussModel) and theta[1] > 0:
        raise DomainError("strauss log_gamma must be <= 0")
    return theta.copy()


def sufficient_statistics(model: ModelSpec, data) -> np.ndarray:
    """Sufficient statistic t(data).

    ``data`` is a 1-D sample array for the Gaussian model and a PointPattern
    (marked for Candy) for the point-process models; the pattern window must
    match the model window.
    """
    if isinstance(model, GaussianModel):
        y = np.asarray(data, dtype=float)
        if y.ndim != 1:
            raise ValueError("gaussian data must be a 1-D sample array")
        if y.size != model.m:
            raise ValueError(f"expected {model.m} observations, got {y.size}")
        return np.array([np.sum(y), np.sum(y * y)])
    if not isinstance(data, PointPattern):
        raise ValueError("point-process statistics need a PointPattern")
    _check_pattern_window(model, data)
    if isinstance(model, StraussModel):
        return np.array([len(data), pair_count(data, model.r)], dtype=float)
    if isinstance(model, CandyModel):
        counts = candy_counts(
            data, model.length, model.r_conn, model.tau_conn, model.r_rej, model.tau_rej
        )
        return np.asarray(counts, dtype=float)
    if isinstance(model, AreaInteractionModel):
        return np.array(
            [len(data), area_statistic(data, model.r, model.resolution)]
        )
    raise TypeError(f"not a model spec: {type(model).__name__}")


def _check_pattern_window(model: ModelSpec, pattern: PointPattern) -> None:
    w = model.window
    pw = pattern.window
    if not (np.allclose(w.lower, pw.lower) and np.allclose(w.upper, pw.upper)):
        raise ValueError("pattern window does not match the model window")


def log_unnormalized_density(model: ModelSpec, t, theta) -> float:
    """log of the unnormalized density: <t, eta(theta)>.

    The normalizing constant never appears; acceptance ratios built from
    differences of this quantity are exactly the normalizing-free ratios the
    shadow chain relies on.
    """
    t = np.asarray(t, dtype=float)
    eta = natural_parameters(model, theta)
    if t.shape != eta.shape:
        raise ValueError("statistic and parameter dimensions disagree")
    return float(np.dot(t, eta))


def gaussian_log_norm_const(model: GaussianModel, theta) -> float:
    """log c(theta) for the Gaussian model, available in closed form."""
    theta = _check_theta(model, theta)
    if theta[1] <= 0:
        raise DomainError("gaussian variance must be positive")
    m = model.m
    return 0.5 * m * np.log(2 * np.pi * theta[1]) + 0.5 * m * theta[0] ** 2 / theta[1]


def sample_gaussian_exact(model: GaussianModel, theta, rng) -> np.ndarray:
    """m exact draws from N(mean, variance); the Gaussian auxiliary refresh."""
    theta = _check_theta(model, theta)
    if theta[1] <= 0:
        raise DomainError("gaussian variance must be positive")
    gen = as_generator(rng)
    return theta[0] + np.sqrt(theta[1]) * gen.standard_normal(model.m)


def validate_statistics(model: ModelSpec, t) -> np.ndarray:
    """Check an ingested observed-statistic vector against model bounds.

    Observed statistics may be ensemble means, so integrality is not
    enforced; impossible values (negative counts, sum of squares below the
    Cauchy-Schwarz bound, area term outside its range) are hard errors.
    """
    t = np.asarray(t, dtype=float)
    k = len(stat_names(model))
    if t.shape != (k,):
        raise ValueError(f"statistics must have shape ({k},), got {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValueError("statistics must be finite")
    if isinstance(model, GaussianModel):
        if t[1] < t[0] ** 2 / model.m:
            raise ValueError("sum of squares below (sum)^2/m: impossible sample")
    elif isinstance(model, StraussModel):
        if t[0] < 0 or t[1] < 0 or t[1] > max(0.0, t[0] * (t[0] - 1) / 2):
            raise ValueError("impossible Strauss statistics")
    elif isinstance(model, CandyModel):
        if np.any(t < 0):
            raise ValueError("candy counts must be non-negative")
    elif isinstance(model, AreaInteractionModel):
        bound = model.window.volume / (np.pi * model.r**2)
        if t[0] < 0 or t[1] > 0 or t[1] < -bound - 1e-9:
            raise ValueError("area term outside [-nu(W)/(pi r^2), 0]")
    return t


def _window_to_dict(window: Window) -> dict:
    return {"lower": window.lower.tolist(), "upper": window.upper.tolist()}


def _window_from_dict(d: dict) -> Window:
    return Window(np.asarray(d["lower"], float), np.asarray(d["upper"], float))


def model_to_dict(model: ModelSpec) -> dict:
    """JSON-ready dict with a ``kind`` tag and named numeric fields."""
    if isinstance(model, GaussianModel):
        return {"kind": "gaussian", "m": model.m}
    if isinstance(model, StraussModel):
        return {"kind": "strauss", "r": model.r, "window": _window_to_dict(model.window)}
    if isinstance(model, CandyModel):
        return {
            "kind": "candy",
            "length": model.length,
            "r_conn": model.r_conn,
            "tau_conn": model.tau_conn,
            "tau_rej": model.tau_rej,
            "r_rej": model.r_rej,
            "window": _window_to_dict(model.window),
        }
    if isinstance(model, AreaInteractionModel):
        return {
            "kind": "area_interaction",
            "r": model.r,
            "resolution": model.resolution,
            "window": _window_to_dict(model.window),
        }
    raise TypeError(f"not a model spec: {type(model).__name__}")


def model_from_dict(d: dict) -> ModelSpec:
    kind = d.get("kind")
    if kind == "gaussian":
        return GaussianModel(m=int(d["m"]))
    if kind == "strauss":
        return StraussModel(r=float(d["r"]), window=_window_from_dict(d["window"]))
    if kind == "candy":
        return CandyModel(
            length=float(d["length"]),
            r_conn=float(d["r_conn"]),
            tau_conn=float(d["tau_conn"]),
            tau_rej=float(d["tau_rej"]),
            r_rej=float(d["r_rej"]) if d.get("r_rej") is not None else None,
            window=_window_from_dict(d["window"]),
        )
    if kind == "area_interaction":
        return AreaInteractionModel(
            r=float(d["r"]),
            resolution=float(d["resolution"]) if d.get("resolution") is not None else None,
            window=_window_from_dict(d["window"]),
        )
    raise ValueError(f"unknown model kind: {kind!r}")
