"""Command-line interface: config handling, artifacts, error contracts."""

import json
import os
import shutil
import subprocess
import sys

import numpy as np
import pytest

import abcshadow as a
from abcshadow import cli
from abcshadow import io as _io

from conftest import random_pattern

STRAUSS_JSON = ('{"kind":"strauss","r":0.1,'
                '"window":{"lower":[0,0],"upper":[1,1]}}')


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def stderr_payload(err):
    return json.loads(err.strip().splitlines()[-1])


@pytest.fixture()
def pattern_csv(tmp_path):
    pattern = random_pattern(a.Window((0.0, 0.0), (1.0, 1.0)), 60, seed=100)
    path = str(tmp_path / "points.csv")
    _io.write_pattern(path, pattern)
    return path


class TestConfigLayer:
    def test_seed_is_required(self, capsys, tmp_path, pattern_csv):
        out_dir = str(tmp_path / "none")
        code, _, err = run_cli(capsys, "analyze-pattern", "--input", pattern_csv,
                               "--window", "0,0,1,1", "-o", out_dir)
        assert code == 2
        payload = stderr_payload(err)
        assert payload["kind"] == "config"
        assert "seed" in payload["error"]
        assert not os.path.exists(out_dir)

    def test_seed_must_be_integer(self, capsys, tmp_path, pattern_csv):
        code, _, err = run_cli(capsys, "analyze-pattern", "--input", pattern_csv,
                               "--window", "0,0,1,1", "--set", "seed=oops",
                               "-o", str(tmp_path / "o"))
        assert code == 2
        assert "integer" in stderr_payload(err)["error"]

    def test_bad_set_flag(self, capsys, tmp_path, pattern_csv):
        code, _, err = run_cli(capsys, "analyze-pattern", "--input", pattern_csv,
                               "--seed", "1", "--set", "no-equals-sign",
                               "-o", str(tmp_path / "o"))
        assert code == 2
        assert stderr_payload(err)["kind"] == "config"

    def test_unknown_subcommand_exits(self):
        with pytest.raises(SystemExit):
            cli.main(["not-a-subcommand"])

    def test_config_file_missing(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "gaussian-bench", "--seed", "1",
                               "--config", str(tmp_path / "absent.json"),
                               "-o", str(tmp_path / "o"))
        assert code == 2
        assert "cannot read config" in stderr_payload(err)["error"]

    def test_config_file_invalid_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run_cli(capsys, "gaussian-bench", "--seed", "1",
                               "--config", str(bad), "-o", str(tmp_path / "o"))
        assert code == 2
        assert "not valid JSON" in stderr_payload(err)["error"]

    def test_config_file_and_set_override(self, capsys, tmp_path, pattern_csv):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"seed": 9, "n_u": 37}))
        out_dir = str(tmp_path / "out")
        code, _, _ = run_cli(capsys, "analyze-pattern", "--input", pattern_csv,
                             "--window", "0,0,1,1", "--config", str(cfg),
                             "--set", "n_u=12", "--no-figures", "-o", out_dir)
        assert code == 0
        manifest = json.loads(open(os.path.join(out_dir, "manifest.json")).read())
        assert manifest["seed"] == 9
        assert manifest["config"]["n_u"] == 12
        rows = _io.read_table(os.path.join(out_dir, "curves.csv"))
        assert len([r for r in rows if r["statistic"] == "K"]) == 12

    def test_missing_input_pattern(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "analyze-pattern", "--seed", "1",
                               "-o", str(tmp_path / "o"))
        assert code == 2
        assert "input pattern" in stderr_payload(err)["error"]

    def test_nonexistent_input_pattern(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "analyze-pattern", "--seed", "1",
                               "--input", str(tmp_path / "absent.csv"),
                               "--window", "0,0,1,1", "-o", str(tmp_path / "o"))
        assert code == 2
        assert stderr_payload(err)["kind"] == "config"

    def test_bad_window_flag(self, capsys, tmp_path, pattern_csv):
        code, _, err = run_cli(capsys, "analyze-pattern", "--seed", "1",
                               "--input", pattern_csv, "--window", "0,0,1",
                               "-o", str(tmp_path / "o"))
        assert code == 2
        assert "x0,y0,x1,y1" in stderr_payload(err)["error"]

    def test_window_required_without_normalize(self, capsys, tmp_path,
                                               pattern_csv):
        code, _, err = run_cli(capsys, "analyze-pattern", "--seed", "1",
                               "--input", pattern_csv, "-o", str(tmp_path / "o"))
        assert code == 2
        assert "window" in stderr_payload(err)["error"]

    def test_points_outside_window_reported(self, capsys, tmp_path,
                                            pattern_csv):
        code, _, err = run_cli(capsys, "analyze-pattern", "--seed", "1",
                               "--input", pattern_csv,
                               "--window", "0,0,0.5,0.5",
                               "-o", str(tmp_path / "o"))
        assert code == 2
        assert "outside the window" in stderr_payload(err)["error"]

    def test_output_dir_env_var(self, capsys, tmp_path, pattern_csv,
                                monkeypatch):
        base = str(tmp_path / "env-base")
        monkeypatch.setenv("ABCSHADOW_OUTPUT_DIR", base)
        code, out, _ = run_cli(capsys, "analyze-pattern", "--seed", "1",
                               "--input", pattern_csv, "--window", "0,0,1,1",
                               "--no-figures", "--set", "n_u=5")
        assert code == 0
        expected = os.path.join(base, "analyze-pattern")
        assert out.strip() == os.path.abspath(expected)
        assert os.path.exists(os.path.join(expected, "manifest.json"))


class TestAnalyzePattern:
    def test_artifacts_and_stdout(self, capsys, tmp_path, pattern_csv):
        out_dir = str(tmp_path / "out")
        code, out, err = run_cli(capsys, "analyze-pattern", "--seed", "3",
                                 "--input", pattern_csv, "--window", "0,0,1,1",
                                 "--set", "n_u=10", "-o", out_dir)
        assert code == 0, err
        assert out.strip() == os.path.abspath(out_dir)
        files = set(os.listdir(out_dir))
        assert files == {"statistics.csv", "curves.csv", "pattern.png",
                         "manifest.json"}
        stats = {r["statistic"]: float(r["value"])
                 for r in _io.read_table(os.path.join(out_dir, "statistics.csv"))}
        assert stats["n_points"] == 60.0
        curves = _io.read_table(os.path.join(out_dir, "curves.csv"))
        assert {r["statistic"] for r in curves} == {"K", "F", "G", "J"}
        assert all(r["lower"] == "" for r in curves)
        manifest = json.loads(open(os.path.join(out_dir, "manifest.json")).read())
        assert set(manifest["outputs"]) == files

    def test_model_statistics_included(self, capsys, tmp_path, pattern_csv):
        out_dir = str(tmp_path / "out")
        code, _, _ = run_cli(capsys, "analyze-pattern", "--seed", "3",
                             "--input", pattern_csv, "--window", "0,0,1,1",
                             "--set", f"model={STRAUSS_JSON}",
                             "--set", "n_u=5", "--no-figures", "-o", out_dir)
        assert code == 0
        stats = {r["statistic"]: float(r["value"])
                 for r in _io.read_table(os.path.join(out_dir, "statistics.csv"))}
        assert set(stats) == {"n_points", "n_close_pairs"}
        pattern = _io.read_pattern(pattern_csv, window=((0, 0), (1, 1)))
        assert stats["n_close_pairs"] == a.pair_count(pattern, 0.1)

    def test_normalize_writes_transform(self, capsys, tmp_path):
        raw = tmp_path / "raw.csv"
        raw.write_text("x,y\n5.0,20.0\n15.0,25.0\n10.0,22.0\n")
        out_dir = str(tmp_path / "out")
        code, _, _ = run_cli(capsys, "analyze-pattern", "--seed", "3",
                             "--input", str(raw), "--normalize",
                             "--set", "n_u=5", "--no-figures", "-o", out_dir)
        assert code == 0
        transform = json.loads(open(os.path.join(out_dir, "transform.json")).read())
        assert transform == {"offset": [5.0, 20.0], "scale": 0.1}

    def test_reruns_are_byte_identical(self, capsys, tmp_path, pattern_csv):
        dirs = [str(tmp_path / "r1"), str(tmp_path / "r2")]
        for d in dirs:
            code, _, _ = run_cli(capsys, "analyze-pattern", "--seed", "3",
                                 "--input", pattern_csv, "--window", "0,0,1,1",
                                 "--set", "n_u=10", "-o", d)
            assert code == 0
        names = set(os.listdir(dirs[0]))
        assert names == set(os.listdir(dirs[1]))
        for name in names - {"manifest.json"}:
            b1 = open(os.path.join(dirs[0], name), "rb").read()
            b2 = open(os.path.join(dirs[1], name), "rb").read()
            assert b1 == b2, f"{name} differs between identical runs"

    def test_no_figures(self, capsys, tmp_path, pattern_csv):
        out_dir = str(tmp_path / "out")
        code, _, _ = run_cli(capsys, "analyze-pattern", "--seed", "3",
                             "--input", pattern_csv, "--window", "0,0,1,1",
                             "--set", "n_u=5", "--no-figures", "-o", out_dir)
        assert code == 0
        assert not [f for f in os.listdir(out_dir) if f.endswith(".png")]


class TestEnvelope:
    def test_artifacts(self, capsys, tmp_path, pattern_csv):
        out_dir = str(tmp_path / "out")
        code, _, err = run_cli(capsys, "envelope", "--seed", "4",
                               "--input", pattern_csv, "--window", "0,0,1,1",
                               "--set", "n_sim=5", "--set", "n_u=8",
                               "--no-figures", "-o", out_dir)
        assert code == 0, err
        files = set(os.listdir(out_dir))
        assert files == {"envelope.csv", "envelope_verdict.json",
                         "manifest.json"}
        verdict = json.loads(open(os.path.join(out_dir,
                                               "envelope_verdict.json")).read())
        assert set(verdict) == {"K", "F", "G", "J"}
        assert all(set(v) == {"inside_fraction", "n_valid"}
                   for v in verdict.values())
        rows = _io.read_table(os.path.join(out_dir, "envelope.csv"))
        k_rows = [r for r in rows if r["statistic"] == "K"]
        assert len(k_rows) == 8
        assert all(r["lower"] != "" for r in k_rows)


class TestErrors:
    def test_gaussian_table(self, capsys, tmp_path):
        out_dir = str(tmp_path / "out")
        code, _, err = run_cli(capsys, "errors", "--seed", "5",
                               "--set", 'model={"kind":"gaussian","m":50}',
                               "--set", "theta=[1.0,2.0]",
                               "--set", "n_sim=40",
                               "--no-figures", "-o", out_dir)
        assert code == 0, err
        rows = _io.read_table(os.path.join(out_dir, "errors.csv"))
        assert [r["parameter"] for r in rows] == ["mean", "variance"]
        assert all(float(r["asymptotic_sd"]) > 0 for r in rows)
        assert rows[0]["n_sim"] == "40"

    def test_missing_model(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "errors", "--seed", "5",
                               "-o", str(tmp_path / "o"))
        assert code == 2
        assert "model" in stderr_payload(err)["error"]

    def test_singular_covariance_is_config_error(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "errors", "--seed", "5",
                               "--set", f"model={STRAUSS_JSON}",
                               "--set", "theta=[3.0,-0.5]",
                               "--set", "n_sim=4",
                               "--set", "sweeps_between=1",
                               "--set", 'pp={"max_points":0}',
                               "-o", str(tmp_path / "o"))
        assert code == 2
        assert "singular" in stderr_payload(err)["error"]


class TestGaussianBench:
    def test_downscaled_run_and_stream_layout(self, capsys, tmp_path):
        out_dir = str(tmp_path / "out")
        code, out, err = run_cli(
            capsys, "gaussian-bench", "--seed", "6", "-o", out_dir,
            "--set", "mh.iterations=2000", "--set", "mh.thinning=100",
            "--set", "shadow.iterations=400", "--set", "shadow.thinning=20",
            "--set", "shadow.n_inner=10")
        assert code == 0, err
        files = set(os.listdir(out_dir))
        assert files == {"mh_trace.csv", "mh_trace.json", "shadow_trace.csv",
                         "shadow_trace.json", "mh_summary.csv",
                         "shadow_summary.csv", "mh_trace.png",
                         "shadow_trace.png", "mh_marginals.png",
                         "shadow_marginals.png", "manifest.json"}
        manifest = json.loads(open(os.path.join(out_dir, "manifest.json")).read())
        assert set(manifest["outputs"]) == files
        # the shadow chain runs on stream 1 of the seed
        trace = _io.read_trace(os.path.join(out_dir, "shadow_trace.csv"))
        cfg = a.ShadowConfig(delta=(0.005, 0.025), n_inner=10, iterations=400,
                             thinning=20, theta0=(2.0, 9.0))
        direct = a.abc_shadow_run(
            a.GaussianModel(1000), [1765.45, 12145.83],
            a.BoxPrior((-100.0, 0.0), (100.0, 200.0)), cfg,
            rng=a.RngState(6, 1))
        np.testing.assert_array_equal(trace.samples, direct.samples)
        assert trace.seed == a.RngState(6, 1)
        summary = _io.read_table(os.path.join(out_dir, "shadow_summary.csv"))
        assert [r["parameter"] for r in summary] == ["mean", "variance"]


class TestPointProcessBenches:
    def test_strauss_forward_only(self, capsys, tmp_path):
        out_dir = str(tmp_path / "out")
        code, _, err = run_cli(
            capsys, "strauss-bench", "--seed", "7", "-o", out_dir,
            "--forward-only", "--no-figures",
            "--set", "forward.burn_in=200", "--set", "forward.n_records=20",
            "--set", "forward.record_every=10")
        assert code == 0, err
        files = set(os.listdir(out_dir))
        assert files == {"forward_stats.csv", "forward_means.csv",
                         "manifest.json"}
        stats = _io.read_table(os.path.join(out_dir, "forward_stats.csv"))
        assert len(stats) == 20
        assert list(stats[0]) == ["n_points", "n_close_pairs"]
        means = _io.read_table(os.path.join(out_dir, "forward_means.csv"))
        got = {r["statistic"]: float(r["mean"]) for r in means}
        expected = np.mean([[float(r["n_points"]), float(r["n_close_pairs"])]
                            for r in stats], axis=0)
        assert got["n_points"] == pytest.approx(expected[0])
        assert got["n_close_pairs"] == pytest.approx(expected[1])

    def test_strauss_with_posterior(self, capsys, tmp_path):
        out_dir = str(tmp_path / "out")
        code, _, err = run_cli(
            capsys, "strauss-bench", "--seed", "7", "-o", out_dir,
            "--no-figures",
            "--set", "forward.burn_in=100", "--set", "forward.n_records=5",
            "--set", "forward.record_every=10",
            "--set", "shadow.iterations=200", "--set", "shadow.thinning=20",
            "--set", "shadow.n_inner=10", "--set", "shadow.aux_sweeps=10")
        assert code == 0, err
        files = set(os.listdir(out_dir))
        assert {"shadow_trace.csv", "shadow_trace.json",
                "shadow_summary.csv"} <= files
        trace = _io.read_trace(os.path.join(out_dir, "shadow_trace.csv"))
        assert trace.samples.shape == (10, 2)
        assert trace.param_names == ("log_beta", "log_gamma")

    def test_candy_forward_only(self, capsys, tmp_path):
        out_dir = str(tmp_path / "out")
        code, _, err = run_cli(
            capsys, "candy-bench", "--seed", "8", "-o", out_dir,
            "--forward-only", "--no-figures",
            "--set", "forward.burn_in=200", "--set", "forward.n_records=5",
            "--set", "forward.record_every=20")
        assert code == 0, err
        stats = _io.read_table(os.path.join(out_dir, "forward_stats.csv"))
        assert list(stats[0]) == ["n_double", "n_single", "n_free", "n_reject"]
        assert len(stats) == 5


class TestDeltaSweep:
    def test_downscaled_sweep(self, capsys, tmp_path):
        out_dir = str(tmp_path / "out")
        code, _, err = run_cli(
            capsys, "delta-sweep", "--seed", "9", "-o", out_dir,
            "--no-figures",
            "--set", "base.iterations=200", "--set", "base.thinning=20",
            "--set", "base.n_inner=10")
        assert code == 0, err
        files = set(os.listdir(out_dir))
        expected_traces = {f"trace_{n}.csv" for n in
                           ("delta-up", "delta-mid", "start-2-9",
                            "start-10-20", "start-minus10-1")}
        assert expected_traces <= files
        assert "sweep_summary.csv" in files
        rows = _io.read_table(os.path.join(out_dir, "sweep_summary.csv"))
        assert len(rows) == 10
        assert list(rows[0]) == ["run", "parameter", "q5", "q25", "q50",
                                 "q75", "q95", "mean", "map"]
        # distinct runs use distinct seed streams
        t1 = _io.read_trace(os.path.join(out_dir, "trace_start-2-9.csv"))
        t2 = _io.read_trace(os.path.join(out_dir, "trace_start-10-20.csv"))
        assert not np.array_equal(t1.samples, t2.samples)

    def test_process_pool_matches_serial(self, capsys, tmp_path):
        dirs = [str(tmp_path / "serial"), str(tmp_path / "pool")]
        for d, threads in zip(dirs, ("1", "2")):
            code, _, err = run_cli(
                capsys, "delta-sweep", "--seed", "9", "-o", d,
                "--no-figures", "--threads", threads,
                "--set", "base.iterations=100", "--set", "base.thinning=20",
                "--set", "base.n_inner=5",
                "--set", 'runs=[{"name":"a","delta":[0.1,0.1]},'
                         '{"name":"b","delta":[0.01,0.05]}]')
            assert code == 0, err
        for name in ("trace_a.csv", "trace_b.csv", "sweep_summary.csv"):
            b1 = open(os.path.join(dirs[0], name)).read()
            b2 = open(os.path.join(dirs[1], name)).read()
            assert b1 == b2

    def test_empty_runs_rejected(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "delta-sweep", "--seed", "9",
                               "--set", "runs=[]", "-o", str(tmp_path / "o"))
        assert code == 2
        assert "at least one run" in stderr_payload(err)["error"]


class TestShadowSubcommand:
    def test_requires_model(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "shadow", "--seed", "10",
                               "-o", str(tmp_path / "o"))
        assert code == 2
        assert "model" in stderr_payload(err)["error"]

    def test_t_obs_from_config(self, capsys, tmp_path):
        out_dir = str(tmp_path / "out")
        code, _, err = run_cli(
            capsys, "shadow", "--seed", "10", "-o", out_dir, "--no-figures",
            "--set", f"model={STRAUSS_JSON}",
            "--set", 'prior={"lower":[3.0,-3.0],"upper":[6.0,0.0]}',
            "--set", "t_obs=[30.0,3.0]",
            "--set", "shadow.iterations=200", "--set", "shadow.thinning=20",
            "--set", "shadow.n_inner=10", "--set", "shadow.aux_sweeps=10")
        assert code == 0, err
        files = set(os.listdir(out_dir))
        assert files == {"shadow_trace.csv", "shadow_trace.json",
                         "shadow_summary.csv", "manifest.json"}

    def test_t_obs_from_pattern_file(self, capsys, tmp_path, pattern_csv):
        out_dir = str(tmp_path / "out")
        code, _, err = run_cli(
            capsys, "shadow", "--seed", "10", "-o", out_dir, "--no-figures",
            "--input", pattern_csv, "--window", "0,0,1,1",
            "--set", f"model={STRAUSS_JSON}",
            "--set", 'prior={"lower":[3.0,-3.0],"upper":[6.0,0.0]}',
            "--set", "shadow.iterations=200", "--set", "shadow.thinning=20",
            "--set", "shadow.n_inner=10", "--set", "shadow.aux_sweeps=10")
        assert code == 0, err
        trace = _io.read_trace(os.path.join(out_dir, "shadow_trace.csv"))
        pattern = _io.read_pattern(pattern_csv, window=((0, 0), (1, 1)))
        model = a.StraussModel(r=0.1, window=pattern.window)
        np.testing.assert_allclose(
            trace.config["t_obs"],
            a.sufficient_statistics(model, pattern))


class TestAbcSubcommands:
    def test_reject_with_quantile(self, capsys, tmp_path):
        out_dir = str(tmp_path / "out")
        code, _, err = run_cli(
            capsys, "abc-reject", "--seed", "11", "-o", out_dir,
            "--no-figures",
            "--set", f"model={STRAUSS_JSON}",
            "--set", 'prior={"lower":[3.0,-3.0],"upper":[6.0,0.0]}',
            "--set", "t_obs=[30.0,3.0]",
            "--set", "n_draws=100", "--set", "epsilon_quantile=0.1",
            "--set", "pp.sweeps=50")
        assert code == 0, err
        meta = json.loads(open(os.path.join(out_dir, "abc_meta.json")).read())
        assert meta["n_draws"] == 100
        assert meta["epsilon"] > 0
        assert meta["k"] is None
        accepted = _io.read_table(os.path.join(out_dir, "accepted.csv"))
        assert meta["n_accepted"] == len(accepted)
        assert 5 <= len(accepted) <= 15
        assert list(accepted[0]) == ["log_beta", "log_gamma"]
        assert os.path.exists(os.path.join(out_dir, "accepted_summary.csv"))

    def test_reject_needs_threshold(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "abc-reject", "--seed", "11",
            "--set", f"model={STRAUSS_JSON}",
            "--set", 'prior={"lower":[3.0,-3.0],"upper":[6.0,0.0]}',
            "--set", "t_obs=[30.0,3.0]", "-o", str(tmp_path / "o"))
        assert code == 2
        assert "epsilon" in stderr_payload(err)["error"]

    def test_knn(self, capsys, tmp_path):
        out_dir = str(tmp_path / "out")
        code, _, err = run_cli(
            capsys, "abc-knn", "--seed", "11", "-o", out_dir, "--no-figures",
            "--set", f"model={STRAUSS_JSON}",
            "--set", 'prior={"lower":[3.0,-3.0],"upper":[6.0,0.0]}',
            "--set", "t_obs=[30.0,3.0]",
            "--set", "n_draws=50", "--set", "k=5", "--set", "pp.sweeps=50")
        assert code == 0, err
        meta = json.loads(open(os.path.join(out_dir, "abc_meta.json")).read())
        assert meta["k"] == 5
        assert meta["n_accepted"] == 5
        assert len(_io.read_table(os.path.join(out_dir, "accepted.csv"))) == 5

    def test_knn_needs_k(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "abc-knn", "--seed", "11",
            "--set", f"model={STRAUSS_JSON}",
            "--set", 'prior={"lower":[3.0,-3.0],"upper":[6.0,0.0]}',
            "--set", "t_obs=[30.0,3.0]", "-o", str(tmp_path / "o"))
        assert code == 2
        assert "'k'" in stderr_payload(err)["error"]


class TestAuxMh:
    def test_needs_widths(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "aux-mh", "--seed", "12",
            "--set", 'model={"kind":"gaussian","m":100}',
            "--set", 'prior={"lower":[-10.0,0.0],"upper":[10.0,20.0]}',
            "--set", "t_obs=[176.5,1214.6]", "-o", str(tmp_path / "o"))
        assert code == 2
        assert "widths" in stderr_payload(err)["error"]

    def test_gaussian_run(self, capsys, tmp_path):
        out_dir = str(tmp_path / "out")
        code, _, err = run_cli(
            capsys, "aux-mh", "--seed", "12", "-o", out_dir, "--no-figures",
            "--set", 'model={"kind":"gaussian","m":100}',
            "--set", 'prior={"lower":[-10.0,0.0],"upper":[10.0,20.0]}',
            "--set", "t_obs=[176.5,1214.6]",
            "--set", "widths=[0.5,0.5]",
            "--set", "iterations=400", "--set", "thinning=20",
            "--set", "theta_hat=[1.7,9.0]")
        assert code == 0, err
        files = set(os.listdir(out_dir))
        assert files == {"aux_mh_trace.csv", "aux_mh_trace.json",
                         "aux_mh_summary.csv", "manifest.json"}
        trace = _io.read_trace(os.path.join(out_dir, "aux_mh_trace.csv"))
        assert trace.samples.shape == (20, 2)


class TestEntryPoint:
    def test_console_script(self, tmp_path, pattern_csv):
        exe = shutil.which("abcshadow")
        if exe is None:
            pytest.skip("console script not installed")
        out_dir = str(tmp_path / "out")
        proc = subprocess.run(
            [exe, "analyze-pattern", "--seed", "2", "--input", pattern_csv,
             "--window", "0,0,1,1", "--set", "n_u=5", "--no-figures",
             "-o", out_dir],
            capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.strip() == os.path.abspath(out_dir)
        assert os.path.exists(os.path.join(out_dir, "curves.csv"))
