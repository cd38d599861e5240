"""End-to-end acceptance gate.

One test per shipped criterion. Each prints a single [PASS]/[FAIL] line with
the measured numbers and its wall time, then asserts. The statistical checks
run at seeds frozen in the project decision notes before the assertions were
written; tolerances belong to the criteria, not to the draws.

The marked-segment forward check (criterion 5, fast gate) asserts reference
means this sampler is known not to reproduce and is expected to stay red;
the analysis lives in the decision notes. The scaled posterior companion
runs ~20 minutes and is opt-in: ``pytest -m extended``.
"""

import math
import os
import time

import numpy as np
import pytest

import abcshadow as a
from abcshadow import cli
from abcshadow import io as _io

import oracles
from conftest import (
    GAUSSIAN_PRIOR,
    T_OBS_GAUSSIAN,
    random_pattern,
    run_toy_chain_chisquare,
    shadow_gap_curve,
)

# benchmark reference tables, rows ordered (q5, q25, q50, mean, q75, q95)
MH_REF_THETA1 = (1.60, 1.69, 1.75, 1.76, 1.82, 1.92)
MH_REF_THETA2 = (8.45, 8.80, 9.07, 9.08, 9.33, 9.76)
SHADOW_REF_THETA1 = (1.60, 1.70, 1.76, 1.76, 1.82, 1.91)
SHADOW_REF_THETA2 = (8.35, 8.78, 9.03, 9.06, 9.33, 9.83)

STRAUSS_FORWARD_MEANS = (34.33, 5.31)
STRAUSS_POSTERIOR_MAP = (4.63, -1.53)
STRAUSS_POSTERIOR_MEDIAN = (4.606, -1.669)

CANDY_TRUTH = (10.0, 7.0, 3.0, -1.0)
CANDY_FORWARD_MEANS = (51.10, 101.06, 19.97, 72.89)


def _report(num, name, ok, detail, elapsed, budget=None):
    status = "PASS" if ok else "FAIL"
    tail = f"{elapsed:.0f}s" + (f", budget {budget:.0f}s" if budget else "")
    print(f"[{status}] criterion {num} ({name}): {detail} [{tail}]")


def _six_tuple(samples, col):
    q = np.quantile(samples[:, col], [0.05, 0.25, 0.50, 0.75, 0.95])
    return (q[0], q[1], q[2], samples[:, col].mean(), q[3], q[4])


def _worst(got, ref):
    return max(abs(g - r) for g, r in zip(got, ref))


def _gaussian_prior():
    (lo1, lo2), (up1, up2) = GAUSSIAN_PRIOR
    return a.BoxPrior((lo1, lo2), (up1, up2))


def test_criterion_01_gaussian_benchmark_tables():
    t0 = time.perf_counter()
    model = a.GaussianModel(1000)
    prior = _gaussian_prior()
    mh = a.gaussian_direct_mh(model, T_OBS_GAUSSIAN, prior, (0.5, 0.5),
                              iterations=12_500_000, thinning=12_500,
                              theta0=(2.0, 9.0), rng=a.RngState(11, 0))
    shadow = a.abc_shadow_run(
        model, T_OBS_GAUSSIAN, prior,
        a.ShadowConfig(delta=(0.005, 0.025), n_inner=500, iterations=25_000,
                       thinning=25, theta0=(2.0, 9.0)),
        rng=a.RngState(11, 1))
    assert len(mh) == 1000 and len(shadow) == 1000
    devs = {
        "mh1": _worst(_six_tuple(mh.samples, 0), MH_REF_THETA1),
        "mh2": _worst(_six_tuple(mh.samples, 1), MH_REF_THETA2),
        "sh1": _worst(_six_tuple(shadow.samples, 0), SHADOW_REF_THETA1),
        "sh2": _worst(_six_tuple(shadow.samples, 1), SHADOW_REF_THETA2),
    }
    elapsed = time.perf_counter() - t0
    ok = (devs["mh1"] <= 0.05 and devs["sh1"] <= 0.05
          and devs["mh2"] <= 0.20 and devs["sh2"] <= 0.20
          and elapsed < 300)
    _report(1, "gaussian benchmark tables", ok,
            "worst deviations mh=({mh1:.3f}, {mh2:.3f}) "
            "shadow=({sh1:.3f}, {sh2:.3f}) vs (0.05, 0.20)".format(**devs),
            elapsed, 300)
    assert devs["mh1"] <= 0.05
    assert devs["mh2"] <= 0.20
    assert devs["sh1"] <= 0.05
    assert devs["sh2"] <= 0.20
    assert elapsed < 300


def test_criterion_02_box_width_sensitivity():
    t0 = time.perf_counter()
    model = a.GaussianModel(1000)
    prior = _gaussian_prior()

    def run(delta, theta0, rng):
        return a.abc_shadow_run(
            model, T_OBS_GAUSSIAN, prior,
            a.ShadowConfig(delta=delta, n_inner=500, iterations=25_000,
                           thinning=25, theta0=theta0), rng=rng)

    wide = run((0.1, 0.1), (2.0, 9.0), a.RngState(11, 2))
    mid = run((0.01, 0.05), (2.0, 9.0), a.RngState(11, 2))
    wide_mean2 = wide.samples[:, 1].mean()
    mid_mean2 = mid.samples[:, 1].mean()

    # multi-start agreement drops the 10% transit-in samples (see notes)
    start_means = []
    for k, theta0 in enumerate([(2.0, 9.0), (10.0, 20.0), (-10.0, 1.0)]):
        tr = run((0.005, 0.025), theta0, a.RngState(0, 10 + k))
        kept = tr.samples[len(tr.samples) // 10:]
        start_means.append(kept[:, 0].mean())
    spread = max(start_means) - min(start_means)

    elapsed = time.perf_counter() - t0
    ok = (wide_mean2 < 8.0 and abs(mid_mean2 - 9.07) <= 0.25
          and spread <= 0.05 and elapsed < 900)
    _report(2, "box width sensitivity", ok,
            f"wide mean2={wide_mean2:.2f}<8, mid mean2={mid_mean2:.3f} "
            f"in 9.07+-0.25, start spread={spread:.4f}<=0.05",
            elapsed, 900)
    assert wide_mean2 < 8.0
    assert abs(mid_mean2 - 9.07) <= 0.25
    assert spread <= 0.05
    assert elapsed < 900


def test_criterion_03_strauss_forward_means(tmp_path, capsys):
    t0 = time.perf_counter()
    out_dir = str(tmp_path / "strauss-forward")
    code = cli.main(["strauss-bench", "--seed", "33", "--forward-only",
                     "--no-figures", "-o", out_dir])
    capsys.readouterr()
    assert code == 0
    means = {r["statistic"]: float(r["mean"])
             for r in _io.read_table(os.path.join(out_dir,
                                                  "forward_means.csv"))}
    got = (means["n_points"], means["n_close_pairs"])
    rel = [abs(g - r) / r for g, r in zip(got, STRAUSS_FORWARD_MEANS)]
    elapsed = time.perf_counter() - t0
    ok = max(rel) <= 0.10 and elapsed < 300
    _report(3, "pairwise-interaction forward means", ok,
            f"means=({got[0]:.2f}, {got[1]:.2f}) vs "
            f"{STRAUSS_FORWARD_MEANS} rel=({rel[0]:.3f}, {rel[1]:.3f})<=0.10",
            elapsed, 300)
    assert max(rel) <= 0.10
    assert elapsed < 300


def test_criterion_04_strauss_posterior():
    t0 = time.perf_counter()
    win = a.Window((0.0, 0.0), (1.0, 1.0))
    model = a.StraussModel(r=0.1, window=win)
    prior = a.BoxPrior((3.5, -5.0), (5.5, 0.0))
    tr = a.abc_shadow_run(
        model, (34.33, 5.31), prior,
        a.ShadowConfig(delta=(0.01, 0.01), n_inner=200, iterations=100_000,
                       thinning=100, aux_sweeps=100),
        rng=a.RngState(0, 6))
    kept = tr.samples[len(tr.samples) // 10:]
    s = a.summarize(kept, param_names=a.param_names(model))
    map_dev = _worst(s.map_estimate, STRAUSS_POSTERIOR_MAP)
    med_dev = _worst(s.quantiles[2], STRAUSS_POSTERIOR_MEDIAN)
    elapsed = time.perf_counter() - t0
    ok = map_dev <= 0.25 and med_dev <= 0.25 and elapsed < 1800
    _report(4, "pairwise-interaction posterior", ok,
            f"MAP={s.map_estimate.round(3).tolist()} dev={map_dev:.3f}, "
            f"median={s.quantiles[2].round(3).tolist()} dev={med_dev:.3f} "
            "(both <=0.25)", elapsed, 1800)
    assert map_dev <= 0.25
    assert med_dev <= 0.25
    assert elapsed < 1800


def test_criterion_05_candy_forward_fast_gate(tmp_path, capsys):
    # Known red: the all-soft interaction rules pack the window more densely
    # than these reference means; the assertion stays at the reference values
    # on purpose. Analysis and measurements are in the decision notes.
    t0 = time.perf_counter()
    out_dir = str(tmp_path / "candy-forward")
    code = cli.main(["candy-bench", "--seed", "34", "--forward-only",
                     "--no-figures", "-o", out_dir])
    capsys.readouterr()
    assert code == 0
    means = _io.read_table(os.path.join(out_dir, "forward_means.csv"))
    got = tuple(float(r["mean"]) for r in means)
    rel = [abs(g - r) / r for g, r in zip(got, CANDY_FORWARD_MEANS)]
    elapsed = time.perf_counter() - t0
    ok = max(rel) <= 0.15
    _report(5, "marked-segment forward means (fast gate)", ok,
            f"means={tuple(round(g, 1) for g in got)} vs "
            f"{CANDY_FORWARD_MEANS}, worst rel={max(rel):.2f}<=0.15",
            elapsed)
    assert max(rel) <= 0.15


@pytest.mark.extended
def test_criterion_05_candy_posterior_map():
    t0 = time.perf_counter()
    win = a.Window((0.0, 0.0), (3.0, 1.0))
    model = a.CandyModel(length=0.12, r_conn=0.01, tau_conn=0.5, tau_rej=0.5,
                         window=win)
    prior = a.BoxPrior((2.0, 2.0, 2.0, -7.0), (12.0, 12.0, 12.0, 0.0))
    tr = a.abc_shadow_run(
        model, CANDY_FORWARD_MEANS, prior,
        a.ShadowConfig(delta=(0.01, 0.01, 0.01, 0.01), n_inner=500,
                       iterations=50_000, thinning=50, aux_sweeps=500),
        rng=a.RngState(11, 7))
    kept = tr.samples[len(tr.samples) // 10:]
    s = a.summarize(kept, param_names=a.param_names(model))
    dev = _worst(s.map_estimate, CANDY_TRUTH)
    elapsed = time.perf_counter() - t0
    ok = dev <= 0.6
    _report(5, "marked-segment posterior (extended)", ok,
            f"MAP={s.map_estimate.round(3).tolist()} vs {CANDY_TRUTH}, "
            f"worst dev={dev:.3f}<=0.6", elapsed)
    assert dev <= 0.6


def test_criterion_06_acceptance_gap_shrinks_with_box():
    t0 = time.perf_counter()
    widths = (0.04, 0.02, 0.01, 0.005)
    gaps = shadow_gap_curve(widths, seed=4242)
    ratios = [gaps[i] / gaps[i + 1] for i in range(len(gaps) - 1)]
    elapsed = time.perf_counter() - t0
    decreasing = all(gaps[i] > gaps[i + 1] for i in range(len(gaps) - 1))
    in_band = all(1.4 <= r <= 2.6 for r in ratios)
    ok = decreasing and in_band and elapsed < 120
    _report(6, "ideal-shadow gap halves with the box", ok,
            f"gaps={[f'{g:.2e}' for g in gaps]} "
            f"ratios={[round(r, 2) for r in ratios]} in [1.4, 2.6]",
            elapsed, 120)
    assert decreasing
    assert in_band
    assert elapsed < 120


def test_criterion_07_geometry_oracles(unit_window):
    t0 = time.perf_counter()
    ranges = (0.05, 0.1, 0.2)
    for i in range(100):
        pat = random_pattern(unit_window, 5 + 9 * (i % 10), seed=500 + i)
        r = ranges[i % 3]
        assert a.pair_count(pat, r) == oracles.brute_pair_count(pat.points, r)
    for i in range(100):
        pat = random_pattern(unit_window, 5 + 7 * (i % 9), seed=600 + i,
                             marked=True)
        got = a.candy_counts(pat, 0.12, 0.01, 0.5, 0.12, 0.5)
        want = oracles.brute_candy_counts(pat.points, pat.marks,
                                          0.12, 0.01, 0.5, 0.12, 0.5)
        assert got == want, i
    worst_rel = 0.0
    for i in range(20):
        pat = random_pattern(unit_window, 10 + 3 * i, seed=700 + i)
        area = a.union_disks_area(pat, 0.08)
        mc = oracles.mc_union_area(pat.points, 0.08, (0.0, 0.0), (1.0, 1.0),
                                   1_000_000, seed=700 + i)
        worst_rel = max(worst_rel, abs(area - mc) / mc)
    elapsed = time.perf_counter() - t0
    ok = worst_rel <= 0.01 and elapsed < 300
    _report(7, "geometry oracles", ok,
            "pair and segment counts exact on 100 patterns each; "
            f"disk-union area worst rel={worst_rel:.4f}<=0.01 on 20",
            elapsed, 300)
    assert worst_rel <= 0.01
    assert elapsed < 300


def test_criterion_08_toy_chain_detailed_balance():
    t0 = time.perf_counter()
    chi2, p, dof = run_toy_chain_chisquare(seed=7, n_blocks=10_000,
                                           block=100, burn_blocks=100)
    elapsed = time.perf_counter() - t0
    ok = p > 0.01 and elapsed < 120
    _report(8, "toy chain matches exact law", ok,
            f"chi2={chi2:.2f} dof={dof} p={p:.4f}>0.01", elapsed, 120)
    assert p > 0.01
    assert elapsed < 120


def test_criterion_09_poisson_envelope_selftest(unit_window):
    t0 = time.perf_counter()
    n_trials = 50
    inside_fracs = np.empty(n_trials)
    k_curves = []
    u_grid = None
    for i in range(n_trials):
        gen = a.RngState(11, 300 + 2 * i).generator()
        pts = gen.uniform(0.0, 1.0, size=(163, 2))
        pattern = a.PointPattern(pts, unit_window)
        results = a.envelope_test(pattern, n_sim=100,
                                  rng=a.RngState(11, 301 + 2 * i))
        # pooled across the four statistics' grids
        n_inside = sum(int(r.inside.sum()) for r in results.values())
        n_valid = sum(int(r.valid.sum()) for r in results.values())
        inside_fracs[i] = n_inside / n_valid
        k_curves.append(results["K"].observed)
        u_grid = results["K"].u
    good_trials = int((inside_fracs >= 0.9).sum())
    mask = (u_grid >= 0.02) & (u_grid <= 0.1)
    mean_k = np.mean(k_curves, axis=0)[mask]
    target = np.pi * u_grid[mask] ** 2
    worst_rel = float(np.max(np.abs(mean_k - target) / target))
    elapsed = time.perf_counter() - t0
    ok = good_trials >= 45 and worst_rel <= 0.10 and elapsed < 600
    _report(9, "uniform-pattern envelope self-test", ok,
            f"{good_trials}/50 trials >=90% inside (need >=45); "
            f"mean second-order curve worst rel={worst_rel:.3f}<=0.10",
            elapsed, 600)
    assert good_trials >= 45
    assert worst_rel <= 0.10
    assert elapsed < 600


def test_criterion_10_cli_pattern_round_trip(tmp_path, capsys, unit_window):
    t0 = time.perf_counter()
    model = a.AreaInteractionModel(r=0.05, window=unit_window)
    theta_true = (5.35, 1.0)
    pattern = a.pp_mh_simulate(model, theta_true, sweeps=30_000,
                               rng=a.RngState(20, 21))
    assert len(pattern) == 163
    t_obs = a.sufficient_statistics(model, pattern)

    csv_path = str(tmp_path / "observed.csv")
    _io.write_pattern(csv_path, pattern)
    out_dir = str(tmp_path / "run")
    model_json = ('{"kind":"area_interaction","r":0.05,'
                  '"window":{"lower":[0,0],"upper":[1,1]}}')
    code = cli.main([
        "shadow", "--seed", "20", "--input", csv_path,
        "--window", "0,0,1,1", "--no-figures", "-o", out_dir,
        "--set", f"model={model_json}",
        "--set", 'prior={"lower":[2.0,-2.0],"upper":[8.0,2.0]}',
        "--set", "shadow.delta=[0.01,0.01]", "--set", "shadow.n_inner=100",
        "--set", "shadow.iterations=4000", "--set", "shadow.thinning=4",
        "--set", "shadow.aux_sweeps=250"])
    capsys.readouterr()
    assert code == 0

    trace = _io.read_trace(os.path.join(out_dir, "shadow_trace.csv"))
    np.testing.assert_allclose(trace.config["t_obs"], t_obs)
    rows = _io.read_table(os.path.join(out_dir, "shadow_summary.csv"))
    assert list(rows[0]) == ["parameter", "q5", "q25", "q50", "q75", "q95",
                             "mean", "map", "bandwidth", "n_samples"]
    assert [r["parameter"] for r in rows] == ["log_beta", "log_gamma"]
    gamma_row = rows[1]
    q5 = float(gamma_row["q5"])
    elapsed = time.perf_counter() - t0
    ok = q5 > 0.0 and elapsed < 600
    _report(10, "pattern file round trip through the CLI", ok,
            f"clustering parameter whisker q5={q5:.3f}>0, "
            f"median={float(gamma_row['q50']):.3f} (truth 1.0)",
            elapsed, 600)
    assert q5 > 0.0
    assert elapsed < 600
