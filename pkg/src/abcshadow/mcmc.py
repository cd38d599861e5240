"""Samplers: the shadow posterior chain, its ideal-chain validator, the
point-process Metropolis-Hastings simulator, and the baseline algorithms
(ABC rejection, k-NN ABC, auxiliary-variable MH, direct Gaussian MH).

The shadow chain targets the posterior of a doubly-intractable
exponential-family model without ever evaluating the normalizing constant:
each outer iteration refreshes an auxiliary draw x ~ p(.|theta) and then runs
n inner uniform-box proposals accepted with probability

    min{1, exp(<eta(psi) - eta(theta), t_obs - t(x)>) * p(psi)/p(theta)},

where t(x) stays fixed during the inner sweep. The ideal chain this shadows
(proposal proportional to the model density restricted to the box) is only
tractable for the Gaussian model and is provided as a numerical-quadrature
validator; the gap between the two acceptance probabilities shrinks linearly
with the box width, which the test suite measures.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._ppstate import AreaState, CandyState, StraussState
from .core import BoxPrior, DomainError, PointPattern, as_generator
from .models import (
    AreaInteractionModel,
    CandyModel,
    GaussianModel,
    ModelSpec,
    StraussModel,
    gaussian_log_norm_const,
    in_domain,
    model_to_dict,
    natural_parameters,
    param_names,
    sample_gaussian_exact,
    stat_names,
    sufficient_statistics,
    validate_statistics,
)

__all__ = [
    "PPSamplerConfig",
    "ShadowConfig",
    "ChainTrace",
    "ABCResult",
    "default_aux_sweeps",
    "pp_mh_simulate",
    "shadow_acceptance",
    "abc_shadow_run",
    "ideal_acceptance_numeric",
    "gaussian_log_posterior",
    "gaussian_direct_mh",
    "abc_rejection",
    "abc_knn",
    "aux_var_mh",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PPSamplerConfig:
    """Birth/death/move Metropolis-Hastings settings for pattern simulation.

    Moves happen with probability 1 - p_birth - p_death and re-draw the
    location uniformly in a disc of radius move_scale/2 (default: the model
    interaction range; segment length for candy) plus, for marked patterns,
    the orientation within +-mark_jitter/2 (default: the connection
    curvature). max_points, when set, hard-caps the pattern by rejecting
    births, i.e. targets the model truncated to {n <= max_points}.
    """

    p_birth: float = 0.4
    p_death: float = 0.4
    sweeps: int = 1000
    move_scale: float | None = None
    mark_jitter: float | None = None
    max_points: int | None = None

    def __post_init__(self):
        if self.p_birth <= 0 or self.p_death <= 0:
            raise ValueError("birth and death probabilities must be positive")
        if self.p_birth + self.p_death > 1.0 + 1e-12:
            raise ValueError("birth and death probabilities must sum to at most 1")
        if self.sweeps < 0:
            raise ValueError("sweeps must be non-negative")
        if self.max_points is not None and self.max_points < 0:
            raise ValueError("max_points must be non-negative")


@dataclass(frozen=True)
class ShadowConfig:
    """Shadow-chain settings.

    delta is the full proposal-box width per coordinate; n_inner the number
    of fixed-auxiliary proposals per refresh; iterations the number of outer
    refreshes; every thinning-th outer state is kept. aux_sweeps is the
    number of point-process MH steps per auxiliary refresh (the Gaussian
    model refreshes exactly); None picks a per-model default (100 for
    pairwise interaction, 2000 for segment models, 250 for area
    interaction). The auxiliary pattern warm-starts from the previous
    refresh, with aux_burn_in extra steps (default 10 * aux_sweeps) spent
    growing the very first pattern from empty.
    """

    delta: tuple[float, ...]
    n_inner: int
    iterations: int
    thinning: int = 1
    aux_sweeps: int | None = None
    aux_burn_in: int | None = None
    theta0: tuple[float, ...] | None = None
    seed: int | None = None
    pp: PPSamplerConfig = field(default_factory=PPSamplerConfig)

    def __post_init__(self):
        if self.n_inner < 1:
            raise ValueError("n_inner must be at least 1")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.thinning < 1 or self.thinning > self.iterations:
            raise ValueError("thinning must lie in [1, iterations]")
        if self.aux_sweeps is not None and self.aux_sweeps < 0:
            raise ValueError("aux_sweeps must be non-negative")


@dataclass
class ChainTrace:
    """Kept samples of one chain plus its provenance."""

    samples: np.ndarray
    param_names: tuple[str, ...]
    acceptance_rate: float
    config: dict
    wall_time_s: float
    seed: object = None

    def __len__(self) -> int:
        return self.samples.shape[0]


def _make_state(model: ModelSpec, init: PointPattern | None):
    if isinstance(model, StraussModel):
        init = init if init is not None else PointPattern.empty(model.window)
        return StraussState(model.window, model.r, init)
    if isinstance(model, AreaInteractionModel):
        init = init if init is not None else PointPattern.empty(model.window)
        return AreaState(model.window, model.r, model.resolution, init)
    if isinstance(model, CandyModel):
        init = init if init is not None else PointPattern.empty(model.window, marked=True)
        return CandyState(model.window, model.length, model.r_conn,
                          model.tau_conn, model.r_rej, model.tau_rej, init)
    raise TypeError("point-process simulation needs a point-process model")


def default_aux_sweeps(model: ModelSpec) -> int:
    """Auxiliary-refresh length used when none is configured."""
    if isinstance(model, StraussModel):
        return 100
    if isinstance(model, CandyModel):
        return 2000
    if isinstance(model, AreaInteractionModel):
        return 250
    return 0


def _move_params(model: ModelSpec, cfg: PPSamplerConfig):
    if cfg.move_scale is not None:
        scale = cfg.move_scale
    elif isinstance(model, (StraussModel, AreaInteractionModel)):
        scale = model.r
    else:
        scale = model.length
    if cfg.mark_jitter is not None:
        jitter = cfg.mark_jitter
    elif isinstance(model, CandyModel):
        jitter = model.tau_conn
    else:
        jitter = 0.0
    return 0.5 * scale, jitter


def _run_pp_steps(state, eta, steps, cfg: PPSamplerConfig, gen, move_r, mark_jitter):
    """Advance a pattern state by single-proposal MH steps at fixed eta.

    Birth: uniform location (and mark) with Hastings factor
    p_death nu(W) / (p_birth (n+1)); death: uniform victim with the inverse
    factor; move: symmetric disc relocation (plus circular mark jitter).
    Detailed balance w.r.t. exp(<t(y), eta>) relative to the unit-rate marked
    Poisson process; the mark factor nu_M(M) is 1 because marks are proposed
    from their reference distribution.
    """
    if steps <= 0:
        return 0
    p_birth = cfg.p_birth
    p_bd = cfg.p_birth + cfg.p_death
    window = state.window
    xlo = float(window.lower[0])
    ylo = float(window.lower[1])
    xhi = float(window.upper[0])
    yhi = float(window.upper[1])
    wx = xhi - xlo
    wy = yhi - ylo
    log_vol = math.log(window.volume)
    log_db = math.log(cfg.p_death / cfg.p_birth)
    marked = state.marked
    max_points = cfg.max_points
    eta = tuple(float(e) for e in eta)
    r = len(eta)
    exp_ = math.exp
    log_ = math.log
    acc = 0
    done = 0
    while done < steps:
        block = min(4096, steps - done)
        done += block
        rows = gen.random((block, 7)).tolist()
        for row in rows:
            u0 = row[0]
            if u0 < p_birth:
                n = state.n
                if max_points is not None and n >= max_points:
                    continue
                x = xlo + wx * row[1]
                y = ylo + wy * row[2]
                mark = math.pi * row[3] if marked else None
                d = state.propose_birth(x, y, mark)
                lh = log_db + log_vol - log_(n + 1.0)
                for j in range(r):
                    lh += eta[j] * d[j]
                if lh >= 0.0 or row[6] < exp_(lh):
                    state.commit()
                    acc += 1
                else:
                    state.abort()
            elif u0 < p_bd:
                n = state.n
                if n == 0:
                    continue
                idx = int(row[1] * n)
                d = state.propose_death(idx)
                lh = -log_db + log_(float(n)) - log_vol
                for j in range(r):
                    lh += eta[j] * d[j]
                if lh >= 0.0 or row[6] < exp_(lh):
                    state.commit()
                    acc += 1
                else:
                    state.abort()
            else:
                n = state.n
                if n == 0:
                    continue
                idx = int(row[1] * n)
                ox, oy, omark = state.location(idx)
                ang = _TWO_PI * row[2]
                rad = move_r * math.sqrt(row[3])
                x = ox + rad * math.cos(ang)
                y = oy + rad * math.sin(ang)
                if x < xlo or x > xhi or y < ylo or y > yhi:
                    continue
                mark = (omark + mark_jitter * (row[4] - 0.5)) % math.pi if marked else None
                d = state.propose_move(idx, x, y, mark)
                lh = 0.0
                for j in range(r):
                    lh += eta[j] * d[j]
                if lh >= 0.0 or row[6] < exp_(lh):
                    state.commit()
                    acc += 1
                else:
                    state.abort()
    return acc


def pp_mh_simulate(
    model: ModelSpec,
    theta,
    config: PPSamplerConfig | None = None,
    init: PointPattern | None = None,
    sweeps: int | None = None,
    rng=None,
) -> PointPattern:
    """Simulate a pattern from p(.|theta) by birth/death/move MH steps.

    Starts from ``init`` (empty by default) and runs ``sweeps`` proposals
    (default config.sweeps); an approximate draw whose quality grows with the
    run length. Passing the returned pattern back as ``init`` with the same
    generator continues the chain exactly.
    """
    config = config or PPSamplerConfig()
    theta = np.asarray(theta, dtype=float)
    if not in_domain(model, theta):
        raise DomainError("theta outside the model domain")
    eta = natural_parameters(model, theta)
    state = _make_state(model, init)
    move_r, jitter = _move_params(model, config)
    gen = as_generator(rng if rng is not None else 0)
    n_steps = config.sweeps if sweeps is None else sweeps
    _run_pp_steps(state, eta, n_steps, config, gen, move_r, jitter)
    return state.pattern()


def shadow_acceptance(model: ModelSpec, t_obs, t_aux, theta, psi,
                      prior: BoxPrior | None = None) -> float:
    """Shadow acceptance probability for a proposed move theta -> psi.

    min{1, exp(<eta(psi) - eta(theta), t_obs - t_aux>) p(psi)/p(theta)};
    the normalizing constants of the model cancel exactly against the ideal
    proposal, so none appears. psi outside the model domain or the prior box
    gives 0; theta must itself be valid.
    """
    theta = np.asarray(theta, dtype=float)
    psi = np.asarray(psi, dtype=float)
    eta_theta = natural_parameters(model, theta)  # raises on invalid theta
    if prior is not None and not prior.contains(theta):
        raise ValueError("theta outside the prior box")
    if not in_domain(model, psi):
        return 0.0
    if prior is not None and not prior.contains(psi):
        return 0.0
    d_eta = natural_parameters(model, psi) - eta_theta
    diff = np.asarray(t_obs, dtype=float) - np.asarray(t_aux, dtype=float)
    lr = float(np.dot(d_eta, diff))
    return math.exp(min(lr, 0.0))


def _inner_gaussian(th1, th2, lo1, up1, lo2, up2, d1, d2, dt1, dt2, rows):
    """Fixed-auxiliary inner sweep for the Gaussian model. rows: n x 3 floats."""
    e1 = th1 / th2
    e2 = -0.5 / th2
    exp_ = math.exp
    acc = 0
    for row in rows:
        p1 = th1 + d1 * (row[0] - 0.5)
        if p1 < lo1 or p1 > up1:
            continue
        p2 = th2 + d2 * (row[1] - 0.5)
        if p2 < lo2 or p2 > up2 or p2 <= 0.0:
            continue
        f1 = p1 / p2
        f2 = -0.5 / p2
        lr = (f1 - e1) * dt1 + (f2 - e2) * dt2
        if lr >= 0.0 or row[2] < exp_(lr):
            th1 = p1
            th2 = p2
            e1 = f1
            e2 = f2
            acc += 1
    return th1, th2, acc


def _inner_identity(theta, lo, up, delta, dt, rows):
    """Fixed-auxiliary inner sweep for identity-eta models; mutates theta."""
    r = len(theta)
    exp_ = math.exp
    acc = 0
    psi = [0.0] * r
    for row in rows:
        ok = True
        lr = 0.0
        for j in range(r):
            pj = theta[j] + delta[j] * (row[j] - 0.5)
            if pj < lo[j] or pj > up[j]:
                ok = False
                break
            psi[j] = pj
            lr += (pj - theta[j]) * dt[j]
        if ok and (lr >= 0.0 or row[r] < exp_(lr)):
            for j in range(r):
                theta[j] = psi[j]
            acc += 1
    return acc


def abc_shadow_run(
    model: ModelSpec,
    t_obs,
    prior: BoxPrior,
    config: ShadowConfig,
    rng=None,
    init: PointPattern | None = None,
) -> ChainTrace:
    """Run the shadow chain and return the thinned trace.

    Each outer iteration refreshes the auxiliary draw at the current
    parameter (exactly for the Gaussian model, by aux_sweeps warm-started MH
    steps for point processes) and then applies n_inner uniform-box proposals
    with the auxiliary statistic frozen. Every thinning-th outer state is
    kept, so the trace holds iterations // thinning samples, all inside the
    prior box.
    """
    t_obs = validate_statistics(model, t_obs)
    names = param_names(model)
    r = len(names)
    if prior.dim != r:
        raise ValueError("prior dimension does not match the model")
    delta = np.asarray(config.delta, dtype=float)
    if delta.shape != (r,) or np.any(delta <= 0):
        raise ValueError("delta must be a positive vector, one width per parameter")
    theta0 = (np.asarray(config.theta0, dtype=float)
              if config.theta0 is not None else prior.center)
    if not prior.contains(theta0):
        raise ValueError("theta0 outside the prior box")
    if not in_domain(model, theta0):
        raise DomainError("theta0 outside the model domain")
    if rng is not None:
        gen = as_generator(rng)
        seed_info = rng if not isinstance(rng, np.random.Generator) else None
    else:
        gen = as_generator(config.seed if config.seed is not None else 0)
        seed_info = config.seed
    kept = config.iterations // config.thinning
    samples = np.empty((kept, r))
    lo = prior.lower.tolist()
    up = prior.upper.tolist()
    dl = delta.tolist()
    accepted = 0
    ptr = 0
    t_start = time.perf_counter()

    if isinstance(model, GaussianModel):
        m = model.m
        tob1 = float(t_obs[0])
        tob2 = float(t_obs[1])
        th1 = float(theta0[0])
        th2 = float(theta0[1])
        n_inner = config.n_inner
        for it in range(config.iterations):
            z = gen.standard_normal(m)
            sd = math.sqrt(th2)
            zs = float(z.sum())
            zss = float(z @ z)
            ta1 = m * th1 + sd * zs
            ta2 = m * th1 * th1 + 2.0 * th1 * sd * zs + th2 * zss
            rows = gen.random((n_inner, 3)).tolist()
            th1, th2, a = _inner_gaussian(
                th1, th2, lo[0], up[0], lo[1], up[1], dl[0], dl[1],
                tob1 - ta1, tob2 - ta2, rows,
            )
            accepted += a
            if (it + 1) % config.thinning == 0:
                samples[ptr, 0] = th1
                samples[ptr, 1] = th2
                ptr += 1
    else:
        state = _make_state(model, init)
        move_r, jitter = _move_params(model, config.pp)
        aux_sweeps = (config.aux_sweeps if config.aux_sweeps is not None
                      else default_aux_sweeps(model))
        up_eff = list(up)
        if isinstance(model, StraussModel):
            # the density is undefined above log_gamma = 0
            up_eff[1] = min(up_eff[1], 0.0)
        theta = theta0.tolist()
        tob = [float(v) for v in t_obs]
        if init is None:
            burn = (config.aux_burn_in if config.aux_burn_in is not None
                    else 10 * aux_sweeps)
            _run_pp_steps(state, theta, burn, config.pp, gen, move_r, jitter)
        for it in range(config.iterations):
            _run_pp_steps(state, theta, aux_sweeps, config.pp, gen,
                          move_r, jitter)
            ta = state.statistics()
            dt = [tob[j] - ta[j] for j in range(r)]
            rows = gen.random((config.n_inner, r + 1)).tolist()
            accepted += _inner_identity(theta, lo, up_eff, dl, dt, rows)
            if (it + 1) % config.thinning == 0:
                samples[ptr] = theta
                ptr += 1

    wall = time.perf_counter() - t_start
    echo = {
        "algorithm": "abc-shadow",
        "model": model_to_dict(model),
        "prior": {"lower": prior.lower.tolist(), "upper": prior.upper.tolist()},
        "t_obs": np.asarray(t_obs, dtype=float).tolist(),
        "delta": delta.tolist(),
        "n_inner": config.n_inner,
        "iterations": config.iterations,
        "thinning": config.thinning,
        "aux_sweeps": (config.aux_sweeps if config.aux_sweeps is not None
                       else default_aux_sweeps(model)),
        "theta0": theta0.tolist(),
    }
    rate = accepted / float(config.iterations * config.n_inner)
    return ChainTrace(samples, names, rate, echo, wall, seed_info)


def _log_box_integral(model: GaussianModel, t_aux, center, delta, n_cells):
    """log of the box integral of f(x|phi)/c(phi) d phi by midpoint quadrature."""
    t1 = float(t_aux[0])
    t2 = float(t_aux[1])
    m = model.m
    xs = center[0] - 0.5 * delta[0] + (np.arange(n_cells) + 0.5) * (delta[0] / n_cells)
    ys = center[1] - 0.5 * delta[1] + (np.arange(n_cells) + 0.5) * (delta[1] / n_cells)
    p1 = xs[:, None]
    p2 = ys[None, :]
    valid = p2 > 0
    safe2 = np.where(valid, p2, 1.0)
    logf = (t1 * p1 / safe2 - 0.5 * t2 / safe2
            - 0.5 * m * np.log(2 * np.pi * safe2) - 0.5 * m * p1 * p1 / safe2)
    logf = np.where(valid, logf, -np.inf)
    peak = np.max(logf)
    if not np.isfinite(peak):
        return -math.inf
    cell = (delta[0] / n_cells) * (delta[1] / n_cells)
    return float(peak + np.log(np.sum(np.exp(logf - peak))) + math.log(cell))


def ideal_acceptance_numeric(
    model: GaussianModel,
    t_obs,
    t_aux,
    theta,
    psi,
    delta,
    n_cells: int = 64,
    prior: BoxPrior | None = None,
) -> float:
    """Ideal-chain acceptance probability, by quadrature (Gaussian only).

    The ideal proposal density is f(x|.)/c(.) restricted to the box
    b(theta, delta/2) and renormalized; its acceptance probability equals the
    shadow one times I(theta, delta, x) / I(psi, delta, x), where I is the
    box integral of the normalized model density. Both integrals are computed
    on an n_cells x n_cells midpoint grid (the quadrature resolution divides
    delta by construction). psi outside b(theta, delta/2) cannot be proposed
    and gets 0.
    """
    if not isinstance(model, GaussianModel):
        raise NotImplementedError("the ideal chain is tractable only for the Gaussian model")
    if n_cells < 2:
        raise ValueError("n_cells must be at least 2")
    theta = np.asarray(theta, dtype=float)
    psi = np.asarray(psi, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if np.any(delta <= 0):
        raise ValueError("delta must be positive")
    half = 0.5 * delta
    if np.any(np.abs(psi - theta) > half * (1 + 1e-12)):
        return 0.0
    if not in_domain(model, psi):
        return 0.0
    if prior is not None:
        if not prior.contains(theta):
            raise ValueError("theta outside the prior box")
        if not prior.contains(psi):
            return 0.0
    t_obs = np.asarray(t_obs, dtype=float)
    t_aux = np.asarray(t_aux, dtype=float)
    d_eta = natural_parameters(model, psi) - natural_parameters(model, theta)
    lr = float(np.dot(d_eta, t_obs - t_aux))
    lr += _log_box_integral(model, t_aux, theta, delta, n_cells)
    lr -= _log_box_integral(model, t_aux, psi, delta, n_cells)
    return math.exp(min(lr, 0.0))


def gaussian_log_posterior(model: GaussianModel, t_obs, theta) -> float:
    """Unnormalized log posterior of the Gaussian model under a flat prior.

    Uses the closed-form normalizing constant; -inf outside the domain.
    """
    theta = np.asarray(theta, dtype=float)
    if not in_domain(model, theta):
        return -math.inf
    t_obs = np.asarray(t_obs, dtype=float)
    eta = natural_parameters(model, theta)
    return float(np.dot(t_obs, eta)) - gaussian_log_norm_const(model, theta)


def gaussian_direct_mh(
    model: GaussianModel,
    t_obs,
    prior: BoxPrior,
    widths,
    iterations: int,
    thinning: int = 1,
    theta0=None,
    burn_in: int = 0,
    rng=None,
) -> ChainTrace:
    """Random-walk MH on the analytic Gaussian posterior (the ground truth).

    Available only because c(theta) is known in closed form here; used to
    validate the shadow chain against exact posterior quantiles.
    """
    t_obs = validate_statistics(model, t_obs)
    widths = np.asarray(widths, dtype=float)
    if widths.shape != (2,) or np.any(widths <= 0):
        raise ValueError("widths must be two positive numbers")
    if thinning < 1 or iterations < thinning:
        raise ValueError("need 1 <= thinning <= iterations")
    theta0 = np.asarray(theta0, dtype=float) if theta0 is not None else prior.center
    if not prior.contains(theta0):
        raise ValueError("theta0 outside the prior box")
    if not in_domain(model, theta0):
        raise DomainError("theta0 outside the model domain")
    gen = as_generator(rng if rng is not None else 0)
    seed_info = rng if not isinstance(rng, np.random.Generator) else None
    m = model.m
    t1 = float(t_obs[0])
    t2 = float(t_obs[1])
    lo1, lo2 = prior.lower.tolist()
    up1, up2 = prior.upper.tolist()
    d1, d2 = widths.tolist()
    th1 = float(theta0[0])
    th2 = float(theta0[1])

    def logpost(a, b):
        return (t1 * a / b - 0.5 * t2 / b
                - 0.5 * m * math.log(_TWO_PI * b) - 0.5 * m * a * a / b)

    lp = logpost(th1, th2)
    kept = iterations // thinning
    samples = np.empty((kept, 2))
    acc = 0
    ptr = 0
    exp_ = math.exp
    t_start = time.perf_counter()
    total = burn_in + iterations
    done = 0
    it = 0
    while done < total:
        block = min(8192, total - done)
        done += block
        rows = gen.random((block, 3)).tolist()
        for row in rows:
            p1 = th1 + d1 * (row[0] - 0.5)
            p2 = th2 + d2 * (row[1] - 0.5)
            if lo1 <= p1 <= up1 and lo2 <= p2 <= up2 and p2 > 0.0:
                lp_new = logpost(p1, p2)
                dl = lp_new - lp
                if dl >= 0.0 or row[2] < exp_(dl):
                    th1 = p1
                    th2 = p2
                    lp = lp_new
                    acc += 1
            it += 1
            if it > burn_in and (it - burn_in) % thinning == 0:
                samples[ptr, 0] = th1
                samples[ptr, 1] = th2
                ptr += 1
    wall = time.perf_counter() - t_start
    echo = {
        "algorithm": "gaussian-direct-mh",
        "m": m,
        "t_obs": [t1, t2],
        "widths": widths.tolist(),
        "iterations": iterations,
        "burn_in": burn_in,
        "thinning": thinning,
        "theta0": theta0.tolist(),
        "prior": {"lower": prior.lower.tolist(), "upper": prior.upper.tolist()},
    }
    return ChainTrace(samples[:ptr], param_names(model), acc / float(total),
                      echo, wall, seed_info)


@dataclass
class ABCResult:
    """Reference table and acceptance outcome of an ABC run."""

    accepted: np.ndarray
    thetas: np.ndarray
    statistics: np.ndarray
    distances: np.ndarray
    scale: np.ndarray
    epsilon: float | None = None
    k: int | None = None


def _reference_table(model, prior, n_draws, gen, pp_config):
    thetas = prior.sample(gen, n_draws)
    k = len(stat_names(model))
    stats = np.empty((n_draws, k))
    if isinstance(model, GaussianModel):
        m = model.m
        block = max(1, min(n_draws, int(4e6 // max(m, 1)) or 1))
        i = 0
        while i < n_draws:
            j = min(n_draws, i + block)
            mu = thetas[i:j, 0][:, None]
            sd = np.sqrt(np.maximum(thetas[i:j, 1], 0.0))[:, None]
            z = gen.standard_normal((j - i, m))
            xs = mu + sd * z
            stats[i:j, 0] = xs.sum(axis=1)
            stats[i:j, 1] = np.einsum("ij,ij->i", xs, xs)
            i = j
    else:
        cfg = pp_config or PPSamplerConfig()
        for i in range(n_draws):
            if not in_domain(model, thetas[i]):
                # e.g. a Strauss prior crossing log_gamma = 0: resample inside
                while not in_domain(model, thetas[i]):
                    thetas[i] = prior.sample(gen)
            pat = pp_mh_simulate(model, thetas[i], cfg, rng=gen)
            stats[i] = sufficient_statistics(model, pat)
    return thetas, stats


def _abc_distances(stats, t_obs, distance):
    if distance is not None:
        d = np.asarray(distance(stats, t_obs), dtype=float)
        if d.shape != (stats.shape[0],):
            raise ValueError("distance must return one value per draw")
        return d, np.ones(stats.shape[1])
    scale = np.std(stats, axis=0, ddof=1)
    scale = np.where(scale > 0, scale, 1.0)
    z = (stats - t_obs) / scale
    return np.sqrt(np.einsum("ij,ij->i", z, z)), scale


def abc_rejection(
    model: ModelSpec,
    t_obs,
    prior: BoxPrior,
    epsilon: float,
    n_draws: int,
    rng=None,
    distance=None,
    pp_config: PPSamplerConfig | None = None,
) -> ABCResult:
    """Plain ABC: keep prior draws whose simulated statistic lands within
    epsilon of the observed one.

    The default distance is Euclidean after dividing each statistic by its
    standard deviation over the reference table itself (the pilot run).
    Point-process draws are approximate (pp_config.sweeps MH steps from
    empty).
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if n_draws < 1:
        raise ValueError("n_draws must be positive")
    t_obs = validate_statistics(model, t_obs)
    gen = as_generator(rng if rng is not None else 0)
    thetas, stats = _reference_table(model, prior, n_draws, gen, pp_config)
    d, scale = _abc_distances(stats, t_obs, distance)
    keep = d <= epsilon
    return ABCResult(thetas[keep], thetas, stats, d, scale, epsilon=epsilon)


def abc_knn(
    model: ModelSpec,
    t_obs,
    prior: BoxPrior,
    k: int,
    n_draws: int,
    rng=None,
    distance=None,
    pp_config: PPSamplerConfig | None = None,
) -> ABCResult:
    """k-NN ABC: keep the k draws whose statistics land nearest t_obs.

    Ties are broken by draw index (stable sort), so the output is a
    deterministic function of the reference table.
    """
    if not (1 <= k <= n_draws):
        raise ValueError("need 1 <= k <= n_draws")
    t_obs = validate_statistics(model, t_obs)
    gen = as_generator(rng if rng is not None else 0)
    thetas, stats = _reference_table(model, prior, n_draws, gen, pp_config)
    d, scale = _abc_distances(stats, t_obs, distance)
    order = np.argsort(d, kind="stable")[:k]
    return ABCResult(thetas[order], thetas, stats, d, scale, k=k)


def aux_var_mh(
    model: ModelSpec,
    observed=None,
    prior: BoxPrior | None = None,
    widths=None,
    iterations: int = 1000,
    aux_sweeps: int | None = None,
    thinning: int = 1,
    theta_hat=None,
    theta0=None,
    t_obs=None,
    init: PointPattern | None = None,
    pp_config: PPSamplerConfig | None = None,
    rng=None,
) -> ChainTrace:
    """Auxiliary-variable MH on the joint (theta, x) space.

    Each step proposes psi from a uniform box and a fresh auxiliary draw
    x' ~ p(.|psi) (exact for the Gaussian, aux_sweeps MH steps from the
    current pattern otherwise); the auxiliary density a(x|theta, y) is the
    model density at the fixed reference theta_hat, whose constant cancels.
    theta_hat defaults to the prior-box center, which is only workable when
    that center sits near the posterior mass; supply a moment estimate
    otherwise or acceptance collapses.
    """
    if prior is None or widths is None:
        raise ValueError("prior and proposal widths are required")
    if t_obs is None:
        if observed is None:
            raise ValueError("need observed data or t_obs")
        t_obs = sufficient_statistics(model, observed)
    t_obs = validate_statistics(model, t_obs)
    names = param_names(model)
    r = len(names)
    widths = np.asarray(widths, dtype=float)
    if widths.shape != (r,) or np.any(widths <= 0):
        raise ValueError("widths must be a positive vector, one per parameter")
    if thinning < 1 or iterations < thinning:
        raise ValueError("need 1 <= thinning <= iterations")
    theta_hat = (np.asarray(theta_hat, dtype=float)
                 if theta_hat is not None else prior.center)
    if not in_domain(model, theta_hat):
        raise DomainError("theta_hat outside the model domain")
    eta_hat = natural_parameters(model, theta_hat)
    theta = np.asarray(theta0, dtype=float) if theta0 is not None else prior.center
    if not prior.contains(theta):
        raise ValueError("theta0 outside the prior box")
    if not in_domain(model, theta):
        raise DomainError("theta0 outside the model domain")
    gen = as_generator(rng if rng is not None else 0)
    seed_info = rng if not isinstance(rng, np.random.Generator) else None
    gaussian = isinstance(model, GaussianModel)
    cfg = pp_config or PPSamplerConfig()
    if aux_sweeps is None:
        aux_sweeps = default_aux_sweeps(model)
    t_start = time.perf_counter()

    if gaussian:
        x = sample_gaussian_exact(model, theta, gen)
        t_x = np.array([x.sum(), x @ x])
    else:
        state = _make_state(model, init)
        move_r, jitter = _move_params(model, cfg)
        if init is None:
            _run_pp_steps(state, natural_parameters(model, theta),
                          10 * aux_sweeps, cfg, gen, move_r, jitter)
        t_x = np.asarray(state.statistics())

    eta_theta = natural_parameters(model, theta)
    kept = iterations // thinning
    samples = np.empty((kept, r))
    acc = 0
    ptr = 0
    for it in range(iterations):
        psi = theta + widths * (gen.random(r) - 0.5)
        if prior.contains(psi) and in_domain(model, psi):
            eta_psi = natural_parameters(model, psi)
            if gaussian:
                x_new = sample_gaussian_exact(model, psi, gen)
                t_new = np.array([x_new.sum(), x_new @ x_new])
            else:
                new_state = state.clone()
                _run_pp_steps(new_state, eta_psi, aux_sweeps, cfg, gen,
                              move_r, jitter)
                t_new = np.asarray(new_state.statistics())
            lr = (float(np.dot(t_obs, eta_psi - eta_theta))
                  + float(np.dot(eta_hat, t_new - t_x))
                  + float(np.dot(t_x, eta_theta))
                  - float(np.dot(t_new, eta_psi)))
            if lr >= 0.0 or gen.random() < math.exp(lr):
                theta = psi
                eta_theta = eta_psi
                t_x = t_new
                if not gaussian:
                    state = new_state
                acc += 1
        if (it + 1) % thinning == 0:
            samples[ptr] = theta
            ptr += 1
    wall = time.perf_counter() - t_start
    echo = {
        "algorithm": "aux-var-mh",
        "model": model_to_dict(model),
        "prior": {"lower": prior.lower.tolist(), "upper": prior.upper.tolist()},
        "t_obs": np.asarray(t_obs, dtype=float).tolist(),
        "widths": widths.tolist(),
        "iterations": iterations,
        "aux_sweeps": aux_sweeps,
        "thinning": thinning,
        "theta_hat": theta_hat.tolist(),
    }
    return ChainTrace(samples, names, acc / float(iterations), echo, wall,
                      seed_info)
