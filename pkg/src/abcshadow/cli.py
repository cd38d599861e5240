"""Experiment runner.

Every subcommand reads an optional JSON config, applies dotted-path
overrides (--set a.b.c=value), and writes its artifacts (delimited tables, a
run manifest, and figures) into the output directory. A seed is mandatory:
nothing in this tool falls back to wall-clock seeding, so a run is a pure
function of its config and seed. Errors print a single JSON line to stderr:
exit status 2 marks a config or input problem, 1 an unexpected failure.

Subcommands
-----------
gaussian-bench   posterior of the two-parameter Gaussian: direct MH baseline
                 against the shadow sampler
strauss-bench    pairwise-interaction benchmark: forward simulation check
                 plus shadow posterior
candy-bench      marked-segment benchmark: forward simulation check plus
                 shadow posterior (posterior part is long)
delta-sweep      shadow sensitivity to proposal-box width and start point
shadow           shadow posterior run for any configured model
abc-reject       plain accept/reject ABC baseline
abc-knn          nearest-neighbours ABC baseline
aux-mh           auxiliary-variable MH baseline
analyze-pattern  statistics and summary curves of one pattern file
envelope         Monte Carlo envelope test of one pattern file
errors           asymptotic and Monte Carlo errors at a fitted parameter
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io as _io
from . import plots
from .core import BoxPrior, DomainError, RngState
from .mcmc import (
    ABCResult,
    PPSamplerConfig,
    ShadowConfig,
    abc_knn,
    abc_rejection,
    abc_shadow_run,
    aux_var_mh,
    gaussian_direct_mh,
    pp_mh_simulate,
)
from .models import (
    GaussianModel,
    model_from_dict,
    param_names,
    stat_names,
    sufficient_statistics,
)
from .posterior import error_estimates, summarize
from .summaries import envelope_test, estimate_summaries, poisson_theoretical

__all__ = ["main", "run_subcommand", "ConfigError"]


class ConfigError(ValueError):
    """Bad config, bad flags, or unusable input files."""


# ------------------------------------------------------------- config layer

def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _apply_set(cfg: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ConfigError(f"--set needs dotted.path=value, got {assignment!r}")
    path, raw = assignment.split("=", 1)
    keys = [k for k in path.strip().split(".") if k]
    if not keys:
        raise ConfigError(f"--set has an empty path: {assignment!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    for key in keys[:-1]:
        nxt = node.get(key)
        if not isinstance(nxt, dict):
            nxt = {}
            node[key] = nxt
        node = nxt
    node[keys[-1]] = value


def _load_config(defaults: dict, args) -> dict:
    cfg = copy.deepcopy(defaults)
    if args.config:
        try:
            with open(args.config) as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        cfg = _deep_merge(cfg, user)
    for assignment in args.set or []:
        _apply_set(cfg, assignment)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if cfg.get("seed") is None:
        raise ConfigError("a seed is required (--seed or config key 'seed')")
    if not isinstance(cfg["seed"], int):
        raise ConfigError("seed must be an integer")
    return cfg


def _output_dir(args, name: str) -> str:
    if args.output:
        return args.output
    base = os.environ.get("ABCSHADOW_OUTPUT_DIR", "abcshadow-runs")
    return os.path.join(base, name)


def _prior_from(cfg: dict) -> BoxPrior:
    try:
        return BoxPrior(np.asarray(cfg["lower"], dtype=float),
                        np.asarray(cfg["upper"], dtype=float))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"prior needs 'lower' and 'upper' lists: {exc}") from exc


def _model_from(cfg: dict):
    try:
        return model_from_dict(cfg)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad model config: {exc}") from exc


def _pp_config_from(cfg: dict | None) -> PPSamplerConfig:
    cfg = cfg or {}
    try:
        return PPSamplerConfig(
            p_birth=cfg.get("p_birth", 0.4),
            p_death=cfg.get("p_death", 0.4),
            sweeps=cfg.get("sweeps", 1000),
            move_scale=cfg.get("move_scale"),
            mark_jitter=cfg.get("mark_jitter"),
            max_points=cfg.get("max_points"),
        )
    except ValueError as exc:
        raise ConfigError(f"bad pp sampler config: {exc}") from exc


def _shadow_config_from(cfg: dict, r: int) -> ShadowConfig:
    try:
        delta = cfg["delta"]
        if isinstance(delta, (int, float)):
            delta = [delta] * r
        return ShadowConfig(
            delta=tuple(float(d) for d in delta),
            n_inner=int(cfg["n_inner"]),
            iterations=int(cfg["iterations"]),
            thinning=int(cfg.get("thinning", 1)),
            aux_sweeps=cfg.get("aux_sweeps"),
            aux_burn_in=cfg.get("aux_burn_in"),
            theta0=tuple(cfg["theta0"]) if cfg.get("theta0") else None,
            pp=_pp_config_from(cfg.get("pp")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad shadow config: {exc}") from exc


def _ingest(args, cfg):
    path = args.input or cfg.get("input")
    if not path:
        raise ConfigError("an input pattern file is required (--input)")
    window = cfg.get("window")
    if args.window:
        parts = [float(v) for v in args.window.split(",")]
        if len(parts) != 4:
            raise ConfigError("--window wants x0,y0,x1,y1")
        window = {"lower": parts[:2], "upper": parts[2:]}
    normalize = bool(args.normalize or cfg.get("normalize"))
    if window is None and not normalize:
        raise ConfigError("a window (--window or config) is required "
                          "unless --normalize is set")
    try:
        return _io.ingest_pattern(path, window=window, normalize=normalize)
    except FileNotFoundError as exc:
        raise ConfigError(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _quantiles(cfg) -> tuple[float, ...]:
    return tuple(cfg.get("quantiles", (0.05, 0.25, 0.50, 0.75, 0.95)))


# ---------------------------------------------------------- artifact helper

class _Artifacts:
    """Collects files for one run and writes the manifest at the end."""

    def __init__(self, outdir: str, subcommand: str, cfg: dict,
                 figures: bool):
        self.outdir = outdir
        self.subcommand = subcommand
        self.cfg = cfg
        self.figures = figures
        self.files: list[str] = []
        os.makedirs(outdir, exist_ok=True)

    def path(self, name: str) -> str:
        self.files.append(name)
        return os.path.join(self.outdir, name)

    def trace(self, name: str, trace) -> None:
        sidecar = _io.write_trace(self.path(name), trace)
        self.files.append(os.path.basename(sidecar))

    def figure(self, name: str, fig_fn, *fn_args, **fn_kwargs) -> None:
        if not self.figures:
            return
        fig = fig_fn(*fn_args, **fn_kwargs)
        plots.save_figure(fig, self.path(name))

    def finish(self) -> None:
        _io.write_manifest(os.path.join(self.outdir, "manifest.json"),
                           self.subcommand, self.cfg.get("seed"), self.cfg,
                           self.files + ["manifest.json"])


# -------------------------------------------------------------- subcommands

GAUSSIAN_DEFAULTS = {
    "m": 1000,
    "t_obs": [1765.45, 12145.83],
    "prior": {"lower": [-100.0, 0.0], "upper": [100.0, 200.0]},
    "mh": {"widths": [0.5, 0.5], "iterations": 12_500_000,
           "thinning": 12_500, "burn_in": 0, "theta0": [2.0, 9.0]},
    "shadow": {"delta": [0.005, 0.025], "n_inner": 500,
               "iterations": 25_000, "thinning": 25, "theta0": [2.0, 9.0]},
}


def _run_gaussian_bench(args, cfg, art: _Artifacts) -> None:
    model = GaussianModel(int(cfg["m"]))
    prior = _prior_from(cfg["prior"])
    t_obs = [float(v) for v in cfg["t_obs"]]
    seed = cfg["seed"]
    mh_cfg = cfg["mh"]
    mh = gaussian_direct_mh(
        model, t_obs, prior,
        widths=mh_cfg["widths"],
        iterations=int(mh_cfg["iterations"]),
        thinning=int(mh_cfg["thinning"]),
        burn_in=int(mh_cfg.get("burn_in", 0)),
        theta0=mh_cfg.get("theta0"),
        rng=RngState(seed, 0),
    )
    shadow = abc_shadow_run(model, t_obs, prior,
                            _shadow_config_from(cfg["shadow"], 2),
                            rng=RngState(seed, 1))
    qs = _quantiles(cfg)
    names = param_names(model)
    art.trace("mh_trace.csv", mh)
    art.trace("shadow_trace.csv", shadow)
    _io.write_summary(art.path("mh_summary.csv"), summarize(mh, qs))
    _io.write_summary(art.path("shadow_summary.csv"), summarize(shadow, qs))
    art.figure("mh_trace.png", plots.fig_trace, mh.samples, names,
               title="direct MH")
    art.figure("shadow_trace.png", plots.fig_trace, shadow.samples, names,
               title="shadow sampler")
    art.figure("mh_marginals.png", plots.fig_marginals, mh.samples, names,
               title="direct MH")
    art.figure("shadow_marginals.png", plots.fig_marginals, shadow.samples,
               names, title="shadow sampler")


STRAUSS_DEFAULTS = {
    "model": {"kind": "strauss", "r": 0.1,
              "window": {"lower": [0.0, 0.0], "upper": [1.0, 1.0]}},
    "theta_true": [4.60, -1.60],
    "forward": {"burn_in": 20_000, "n_records": 1000, "record_every": 100},
    "t_obs": [34.33, 5.31],
    "prior": {"lower": [3.5, -5.0], "upper": [5.5, 0.0]},
    "shadow": {"delta": [0.01, 0.01], "n_inner": 200, "iterations": 100_000,
               "thinning": 100, "aux_sweeps": 100},
}

CANDY_DEFAULTS = {
    "model": {"kind": "candy", "length": 0.12, "r_conn": 0.01,
              "tau_conn": 0.5, "tau_rej": 0.5,
              "window": {"lower": [0.0, 0.0], "upper": [3.0, 1.0]}},
    "theta_true": [10.0, 7.0, 3.0, -1.0],
    "forward": {"burn_in": 200_000, "n_records": 1000, "record_every": 2000},
    "t_obs": [51.10, 101.06, 19.97, 72.89],
    "prior": {"lower": [2.0, 2.0, 2.0, -7.0], "upper": [12.0, 12.0, 12.0, 0.0]},
    "shadow": {"delta": [0.01, 0.01, 0.01, 0.01], "n_inner": 500,
               "iterations": 50_000, "thinning": 50, "aux_sweeps": 500},
}


def _forward_check(model, theta, fwd_cfg, pp_cfg, gen, art: _Artifacts):
    """Long forward run recording statistics every few sweeps."""
    burn = int(fwd_cfg.get("burn_in", 10_000))
    every = int(fwd_cfg.get("record_every", 100))
    n_records = int(fwd_cfg.get("n_records", 1000))
    names = stat_names(model)
    pattern = pp_mh_simulate(model, theta, pp_cfg, sweeps=burn, rng=gen)
    records = np.empty((n_records, len(names)))
    for i in range(n_records):
        pattern = pp_mh_simulate(model, theta, pp_cfg, init=pattern,
                                 sweeps=every, rng=gen)
        records[i] = sufficient_statistics(model, pattern)
    _io.write_rows(art.path("forward_stats.csv"), names, records)
    means = records.mean(axis=0)
    _io.write_rows(art.path("forward_means.csv"), ["statistic", "mean"],
                   zip(names, means))
    return pattern, means


def _run_pp_bench(args, cfg, art: _Artifacts) -> None:
    model = _model_from(cfg["model"])
    theta_true = [float(v) for v in cfg["theta_true"]]
    seed = cfg["seed"]
    pp_cfg = _pp_config_from(cfg.get("pp"))
    pattern, _ = _forward_check(model, theta_true, cfg["forward"], pp_cfg,
                                RngState(seed, 0).generator(), art)
    is_candy = cfg["model"]["kind"] == "candy"
    art.figure("forward_pattern.png", plots.fig_pattern, pattern,
               segment_length=cfg["model"].get("length") if is_candy else None,
               title="forward simulation")
    if args.forward_only:
        return
    prior = _prior_from(cfg["prior"])
    t_obs = [float(v) for v in cfg["t_obs"]]
    shadow = abc_shadow_run(model, t_obs, prior,
                            _shadow_config_from(cfg["shadow"],
                                                len(param_names(model))),
                            rng=RngState(seed, 1))
    qs = _quantiles(cfg)
    names = param_names(model)
    art.trace("shadow_trace.csv", shadow)
    _io.write_summary(art.path("shadow_summary.csv"),
                      summarize(shadow, qs))
    art.figure("shadow_trace.png", plots.fig_trace, shadow.samples, names)
    art.figure("shadow_marginals.png", plots.fig_marginals, shadow.samples,
               names, truth=theta_true)
    art.figure("shadow_boxplots.png", plots.fig_boxplots, shadow.samples,
               names, truth=theta_true)


SWEEP_DEFAULTS = {
    "m": 1000,
    "t_obs": [1765.45, 12145.83],
    "prior": {"lower": [-100.0, 0.0], "upper": [100.0, 200.0]},
    "base": {"delta": [0.005, 0.025], "n_inner": 500, "iterations": 25_000,
             "thinning": 25, "theta0": [2.0, 9.0]},
    "runs": [
        {"name": "delta-up", "delta": [0.1, 0.1]},
        {"name": "delta-mid", "delta": [0.01, 0.05]},
        {"name": "start-2-9", "theta0": [2.0, 9.0]},
        {"name": "start-10-20", "theta0": [10.0, 20.0]},
        {"name": "start-minus10-1", "theta0": [-10.0, 1.0]},
    ],
}


def _sweep_one(payload):
    """One sweep run; module-level so process pools can pickle it."""
    (m, t_obs, prior_lo, prior_up, shadow_cfg, seed, stream) = payload
    model = GaussianModel(m)
    prior = BoxPrior(np.asarray(prior_lo), np.asarray(prior_up))
    trace = abc_shadow_run(model, t_obs, prior,
                           _shadow_config_from(shadow_cfg, 2),
                           rng=RngState(seed, stream))
    return trace


def _run_delta_sweep(args, cfg, art: _Artifacts) -> None:
    seed = cfg["seed"]
    runs = cfg["runs"]
    if not runs:
        raise ConfigError("delta-sweep needs at least one run")
    payloads = []
    names = []
    for i, run in enumerate(runs):
        merged = _deep_merge(cfg["base"], {k: v for k, v in run.items()
                                           if k != "name"})
        name = run.get("name", f"run{i}")
        names.append(name)
        payloads.append((int(cfg["m"]), [float(v) for v in cfg["t_obs"]],
                         cfg["prior"]["lower"], cfg["prior"]["upper"],
                         merged, seed, i))
    threads = max(1, int(args.threads or 1))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            traces = list(pool.map(_sweep_one, payloads))
    else:
        traces = [_sweep_one(p) for p in payloads]
    qs = _quantiles(cfg)
    rows = []
    for name, trace in zip(names, traces):
        art.trace(f"trace_{name}.csv", trace)
        summary = summarize(trace, qs)
        for j, pname in enumerate(summary.param_names):
            row = {"run": name, "parameter": pname}
            for i, p in enumerate(summary.quantile_probs):
                row[f"q{int(round(100 * p))}"] = summary.quantiles[i, j]
            row["mean"] = summary.mean[j]
            row["map"] = summary.map_estimate[j]
            rows.append(row)
    header = list(rows[0])
    _io.write_rows(art.path("sweep_summary.csv"), header,
                   ([row[h] for h in header] for row in rows))


SHADOW_DEFAULTS = {
    "shadow": {"delta": 0.01, "n_inner": 100, "iterations": 10_000,
               "thinning": 10},
}


def _resolve_t_obs(args, cfg, model):
    if cfg.get("t_obs") is not None:
        return [float(v) for v in cfg["t_obs"]], None
    pattern, transform = _ingest(args, cfg)
    try:
        t = sufficient_statistics(model, pattern)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot compute statistics: {exc}") from exc
    return t.tolist(), (pattern, transform)


def _run_shadow(args, cfg, art: _Artifacts) -> None:
    if "model" not in cfg:
        raise ConfigError("shadow needs a model config")
    model = _model_from(cfg["model"])
    prior = _prior_from(cfg["prior"])
    t_obs, ingested = _resolve_t_obs(args, cfg, model)
    trace = abc_shadow_run(model, t_obs, prior,
                           _shadow_config_from(cfg["shadow"],
                                               len(param_names(model))),
                           rng=RngState(cfg["seed"], 1))
    names = param_names(model)
    art.trace("shadow_trace.csv", trace)
    _io.write_summary(art.path("shadow_summary.csv"),
                      summarize(trace, _quantiles(cfg)))
    art.figure("shadow_trace.png", plots.fig_trace, trace.samples, names)
    art.figure("shadow_marginals.png", plots.fig_marginals, trace.samples,
               names)
    art.figure("shadow_boxplots.png", plots.fig_boxplots, trace.samples,
               names)
    if ingested is not None:
        art.figure("pattern.png", plots.fig_pattern, ingested[0])


ABC_DEFAULTS = {
    "n_draws": 10_000,
    "pp": {"sweeps": 1000},
}


def _run_abc(args, cfg, art: _Artifacts, mode: str) -> None:
    if "model" not in cfg:
        raise ConfigError(f"{mode} needs a model config")
    model = _model_from(cfg["model"])
    prior = _prior_from(cfg["prior"])
    t_obs, _ = _resolve_t_obs(args, cfg, model)
    pp_cfg = _pp_config_from(cfg.get("pp"))
    rng = RngState(cfg["seed"], 1)
    n_draws = int(cfg["n_draws"])
    if mode == "abc-knn":
        k = cfg.get("k")
        if k is None:
            raise ConfigError("abc-knn needs 'k'")
        result = abc_knn(model, t_obs, prior, int(k), n_draws, rng=rng,
                         pp_config=pp_cfg)
    else:
        epsilon = cfg.get("epsilon")
        quantile = cfg.get("epsilon_quantile")
        if epsilon is None and quantile is None:
            raise ConfigError("abc-reject needs 'epsilon' or 'epsilon_quantile'")
        if epsilon is None:
            # pilot calibration: run once with an infinite threshold, then cut
            pilot = abc_rejection(model, t_obs, prior, float("inf"), n_draws,
                                  rng=rng, pp_config=pp_cfg)
            epsilon = float(np.quantile(pilot.distances, float(quantile)))
            keep = pilot.distances <= epsilon
            result = ABCResult(pilot.thetas[keep], pilot.thetas,
                               pilot.statistics, pilot.distances,
                               pilot.scale, epsilon=epsilon)
        else:
            result = abc_rejection(model, t_obs, prior, float(epsilon),
                                   n_draws, rng=rng, pp_config=pp_cfg)
    names = param_names(model)
    _io.write_rows(art.path("accepted.csv"), names, result.accepted)
    meta = {
        "n_draws": n_draws,
        "n_accepted": int(result.accepted.shape[0]),
        "epsilon": result.epsilon,
        "k": result.k,
        "distance_scale": result.scale.tolist(),
    }
    _io.atomic_write_text(art.path("abc_meta.json"),
                          json.dumps(meta, indent=2, sort_keys=True) + "\n")
    if result.accepted.shape[0] >= 2:
        _io.write_summary(art.path("accepted_summary.csv"),
                          summarize(result.accepted, _quantiles(cfg),
                                    param_names=names))
        art.figure("accepted_marginals.png", plots.fig_marginals,
                   result.accepted, names)


AUX_DEFAULTS = {
    "iterations": 10_000,
    "thinning": 10,
}


def _run_aux_mh(args, cfg, art: _Artifacts) -> None:
    if "model" not in cfg:
        raise ConfigError("aux-mh needs a model config")
    model = _model_from(cfg["model"])
    prior = _prior_from(cfg["prior"])
    t_obs, _ = _resolve_t_obs(args, cfg, model)
    widths = cfg.get("widths")
    if widths is None:
        raise ConfigError("aux-mh needs proposal 'widths'")
    trace = aux_var_mh(
        model,
        prior=prior,
        widths=[float(v) for v in widths],
        iterations=int(cfg["iterations"]),
        aux_sweeps=cfg.get("aux_sweeps"),
        thinning=int(cfg.get("thinning", 1)),
        theta_hat=cfg.get("theta_hat"),
        theta0=cfg.get("theta0"),
        t_obs=t_obs,
        pp_config=_pp_config_from(cfg.get("pp")),
        rng=RngState(cfg["seed"], 1),
    )
    names = param_names(model)
    art.trace("aux_mh_trace.csv", trace)
    _io.write_summary(art.path("aux_mh_summary.csv"),
                      summarize(trace, _quantiles(cfg)))
    art.figure("aux_mh_trace.png", plots.fig_trace, trace.samples, names)
    art.figure("aux_mh_marginals.png", plots.fig_marginals, trace.samples,
               names)


ANALYZE_DEFAULTS = {
    "n_u": 50,
    "f_grid": 128,
}


def _run_analyze(args, cfg, art: _Artifacts) -> None:
    pattern, transform = _ingest(args, cfg)
    rows = [("n_points", float(len(pattern)))]
    if cfg.get("model"):
        model = _model_from(cfg["model"])
        t = sufficient_statistics(model, pattern)
        rows.extend(zip(stat_names(model), t.tolist()))
    seen: set[str] = set()
    unique_rows = [(n, v) for n, v in rows
                   if not (n in seen or seen.add(n))]
    _io.write_rows(art.path("statistics.csv"), ["statistic", "value"],
                   unique_rows)
    curves = estimate_summaries(pattern, n_u=int(cfg["n_u"]),
                                f_grid=int(cfg["f_grid"]))
    theo = poisson_theoretical(curves.u, curves.intensity)
    _io.write_curves(art.path("curves.csv"), {
        name: {"u": curves.u, "observed": curves.by_name(name),
               "theoretical": theo[name]}
        for name in ("K", "F", "G", "J")
    })
    if transform is not None:
        _io.atomic_write_text(art.path("transform.json"),
                              json.dumps(transform, indent=2, sort_keys=True) + "\n")
    art.figure("pattern.png", plots.fig_pattern, pattern,
               segment_length=(cfg.get("model") or {}).get("length"))


ENVELOPE_DEFAULTS = {
    "n_sim": 100,
    "n_u": 50,
    "f_grid": 128,
}


def _run_envelope(args, cfg, art: _Artifacts) -> None:
    pattern, transform = _ingest(args, cfg)
    results = envelope_test(pattern, n_sim=int(cfg["n_sim"]),
                            n_u=int(cfg["n_u"]), f_grid=int(cfg["f_grid"]),
                            rng=RngState(cfg["seed"], 2))
    _io.write_curves(art.path("envelope.csv"), results)
    verdict = {name: {"inside_fraction": res.inside_fraction,
                      "n_valid": int(res.valid.sum())}
               for name, res in results.items()}
    _io.atomic_write_text(art.path("envelope_verdict.json"),
                          json.dumps(verdict, indent=2, sort_keys=True) + "\n")
    if transform is not None:
        _io.atomic_write_text(art.path("transform.json"),
                              json.dumps(transform, indent=2, sort_keys=True) + "\n")
    art.figure("envelope.png", plots.fig_envelopes, results)


ERRORS_DEFAULTS = {
    "n_sim": 1000,
}


def _run_errors(args, cfg, art: _Artifacts) -> None:
    entries = cfg.get("entries")
    if entries is None:
        if "model" not in cfg or cfg.get("theta") is None:
            raise ConfigError("errors needs 'model' and 'theta' "
                              "(or an 'entries' list)")
        entries = [{"labels": {}, "model": cfg["model"], "theta": cfg["theta"],
                    "n_sim": cfg.get("n_sim"),
                    "sweeps_between": cfg.get("sweeps_between")}]
    items = []
    for i, entry in enumerate(entries):
        model = _model_from(entry["model"])
        theta = [float(v) for v in entry["theta"]]
        try:
            est = error_estimates(
                model, theta,
                n_sim=int(entry.get("n_sim") or cfg["n_sim"]),
                rng=RngState(cfg["seed"], 3 + i),
                pp_config=_pp_config_from(entry.get("pp") or cfg.get("pp")),
                sweeps_between=entry.get("sweeps_between"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        items.append((entry.get("labels", {}), est))
    _io.write_errors(art.path("errors.csv"), items)


# --------------------------------------------------------------- dispatcher

_SUBCOMMANDS = {
    "gaussian-bench": (GAUSSIAN_DEFAULTS, _run_gaussian_bench),
    "strauss-bench": (STRAUSS_DEFAULTS, _run_pp_bench),
    "candy-bench": (CANDY_DEFAULTS, _run_pp_bench),
    "delta-sweep": (SWEEP_DEFAULTS, _run_delta_sweep),
    "shadow": (SHADOW_DEFAULTS, _run_shadow),
    "abc-reject": (ABC_DEFAULTS, lambda a, c, art: _run_abc(a, c, art, "abc-reject")),
    "abc-knn": (ABC_DEFAULTS, lambda a, c, art: _run_abc(a, c, art, "abc-knn")),
    "aux-mh": (AUX_DEFAULTS, _run_aux_mh),
    "analyze-pattern": (ANALYZE_DEFAULTS, _run_analyze),
    "envelope": (ENVELOPE_DEFAULTS, _run_envelope),
    "errors": (ERRORS_DEFAULTS, _run_errors),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abcshadow",
        description="Posterior sampling for models with intractable "
                    "normalizing constants, plus point-pattern analysis.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--set", action="append", metavar="PATH=VALUE",
                       help="override a dotted config path; value is JSON")
        p.add_argument("--seed", type=int, help="RNG seed (required here "
                       "or in the config)")
        p.add_argument("--output", "-o", help="output directory (default: "
                       "$ABCSHADOW_OUTPUT_DIR/<subcommand>)")
        p.add_argument("--no-figures", action="store_true",
                       help="skip figure rendering")
        p.add_argument("--threads", type=int, default=1,
                       help="parallel workers where supported")
        p.add_argument("--input", help="pattern CSV (x,y[,angle])")
        p.add_argument("--window", metavar="X0,Y0,X1,Y1",
                       help="observation window of the input pattern")
        p.add_argument("--normalize", action="store_true",
                       help="rescale input coordinates into the unit square")
        if name in ("strauss-bench", "candy-bench"):
            p.add_argument("--forward-only", action="store_true",
                           help="skip the posterior run")
    return parser


def run_subcommand(name: str, args) -> int:
    defaults, runner = _SUBCOMMANDS[name]
    cfg = _load_config(defaults, args)
    outdir = _output_dir(args, name)
    art = _Artifacts(outdir, name, cfg, figures=not args.no_figures)
    runner(args, cfg, art)
    art.finish()
    print(os.path.abspath(outdir))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return run_subcommand(args.subcommand, args)
    except (ConfigError, FileNotFoundError) as exc:
        print(json.dumps({"kind": "config", "error": str(exc)}),
              file=sys.stderr)
        return 2
    except (DomainError, ValueError) as exc:
        print(json.dumps({"kind": "invalid", "error": str(exc)}),
              file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - unexpected failures
        print(json.dumps({"kind": "runtime",
                          "error": f"{type(exc).__name__}: {exc}"}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
