import json

import numpy as np
import pytest
from click.testing import CliRunner

from graphsr.cli import _resolve_data_dir, main
from graphsr.graph import build_similarity_graph, laplacian
from graphsr.graphio import read_graph, read_signal, write_graph, write_signal
from graphsr.recovery import LassoConfig
from graphsr.selector import GroundTruthOracle, run_sr
from graphsr.spectral import KernelSpec, eigendecompose

from conftest import random_graph


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workspace(tmp_path, rng):
    """Feature CSV + prebuilt graph + bandlimited-ish truth CSV."""
    features = rng.normal(size=(12, 3))
    fpath = tmp_path / "features.csv"
    write_signal(features, fpath)
    g = build_similarity_graph(features, sigma=1.0)
    gpath = tmp_path / "g.grf"
    write_graph(g, gpath)
    truth = rng.normal(size=(12, 2))
    tpath = tmp_path / "truth.csv"
    write_signal(truth, tpath)
    return {
        "dir": tmp_path,
        "features": fpath,
        "graph": gpath,
        "g": g,
        "truth": truth,
        "truth_path": tpath,
    }


class TestBuildGraph:
    def test_p2_features(self, runner, tmp_path):
        fpath = tmp_path / "f.csv"
        fpath.write_text("f0\n0.0\n1.0\n")
        out = tmp_path / "out.grf"
        result = runner.invoke(
            main, ["build-graph", "--features", str(fpath), "--sigma", "1.0",
                   "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert "N=2" in result.output and "edges=1" in result.output
        g = read_graph(out)
        assert g.n_edges == 1

    def test_matches_library_byte_for_byte(self, runner, workspace, tmp_path):
        out = tmp_path / "cli.grf"
        result = runner.invoke(
            main, ["build-graph", "--features", str(workspace["features"]),
                   "--sigma", "1.0", "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert out.read_bytes() == workspace["graph"].read_bytes()

    def test_fifty_points_match_library_call(self, runner, tmp_path):
        rng = np.random.default_rng(55)
        features = rng.normal(size=(50, 4))
        fpath = tmp_path / "f50.csv"
        write_signal(features, fpath)
        expected = tmp_path / "lib.grf"
        write_graph(build_similarity_graph(features, sigma=1.0), expected)
        out = tmp_path / "cli50.grf"
        result = runner.invoke(
            main, ["build-graph", "--features", str(fpath), "--sigma", "1.0",
                   "-o", str(out)]
        )
        assert result.exit_code == 0
        assert out.read_bytes() == expected.read_bytes()

    def test_knn_flag(self, runner, workspace, tmp_path):
        out = tmp_path / "knn.grf"
        result = runner.invoke(
            main, ["build-graph", "--features", str(workspace["features"]),
                   "--sigma", "1.0", "--knn", "3", "-o", str(out)]
        )
        assert result.exit_code == 0
        assert read_graph(out).n_edges < workspace["g"].n_edges

    def test_distances_input(self, runner, tmp_path):
        dpath = tmp_path / "d.csv"
        dpath.write_text("0.0,2.0\n2.0,0.0\n")
        out = tmp_path / "d.grf"
        result = runner.invoke(
            main, ["build-graph", "--distances", str(dpath), "--sigma", "2.0",
                   "-o", str(out)]
        )
        assert result.exit_code == 0
        assert read_graph(out).edges[0][2] == pytest.approx(np.exp(-1.0))

    def test_bad_csv_exits_2(self, runner, tmp_path):
        fpath = tmp_path / "f.csv"
        fpath.write_text("f0,f1\n1.0\n")
        result = runner.invoke(
            main, ["build-graph", "--features", str(fpath), "-o",
                   str(tmp_path / "x.grf")]
        )
        assert result.exit_code == 2

    def test_both_inputs_rejected(self, runner, tmp_path):
        result = runner.invoke(
            main, ["build-graph", "--features", "a", "--distances", "b",
                   "-o", "c"]
        )
        assert result.exit_code == 2


class TestRunSr:
    def test_writes_outputs_and_matches_library(self, runner, workspace, tmp_path):
        out = tmp_path / "Z.csv"
        log = tmp_path / "run.jsonl"
        result = runner.invoke(
            main, ["run-sr", "-g", str(workspace["graph"]),
                   "--truth", str(workspace["truth_path"]),
                   "-m", "5", "-k", "4", "--xi", "0.01", "--alpha", "1.0",
                   "--out", str(out), "--log", str(log)]
        )
        assert result.exit_code == 0, result.output
        spec = eigendecompose(laplacian(workspace["g"]), 4)
        ref = run_sr(
            spec, KernelSpec("heat"), GroundTruthOracle(workspace["truth"]),
            m=5, cfg=LassoConfig(xi=0.01), alpha=1.0,
        )
        assert np.array_equal(read_signal(out), ref.z_star)
        records = [json.loads(line) for line in log.read_text().splitlines()]
        assert [r["vertex"] for r in records] == ref.policy
        assert all(
            set(r) == {"iter", "vertex", "delta", "s", "eta", "residual", "wall_ms"}
            for r in records
        )

    def test_rerun_is_byte_identical(self, runner, workspace, tmp_path):
        args = ["run-sr", "-g", str(workspace["graph"]),
                "--truth", str(workspace["truth_path"]),
                "-m", "4", "-k", "3", "--out", str(tmp_path / "z1.csv"),
                "--log", str(tmp_path / "l1.jsonl")]
        assert runner.invoke(main, args).exit_code == 0
        args2 = ["run-sr", "-g", str(workspace["graph"]),
                 "--truth", str(workspace["truth_path"]),
                 "-m", "4", "-k", "3", "--out", str(tmp_path / "z2.csv"),
                 "--log", str(tmp_path / "l2.jsonl")]
        assert runner.invoke(main, args2).exit_code == 0
        assert (tmp_path / "z1.csv").read_bytes() == (tmp_path / "z2.csv").read_bytes()
        strip = lambda p: [
            {k: v for k, v in json.loads(line).items() if k != "wall_ms"}
            for line in p.read_text().splitlines()
        ]
        assert strip(tmp_path / "l1.jsonl") == strip(tmp_path / "l2.jsonl")

    def test_truth_size_mismatch_exits_2(self, runner, workspace, tmp_path):
        bad = tmp_path / "bad.csv"
        write_signal(np.zeros((3, 2)), bad)
        result = runner.invoke(
            main, ["run-sr", "-g", str(workspace["graph"]), "--truth", str(bad),
                   "-m", "2", "-k", "2", "--out", str(tmp_path / "z.csv")]
        )
        assert result.exit_code == 2

    def test_missing_graph_exits_2(self, runner, workspace, tmp_path):
        result = runner.invoke(
            main, ["run-sr", "-g", str(tmp_path / "nope.grf"),
                   "--truth", str(workspace["truth_path"]),
                   "-m", "2", "-k", "2", "--out", str(tmp_path / "z.csv")]
        )
        assert result.exit_code == 2


class TestEvaluate:
    def test_report_on_stdout(self, runner, workspace, tmp_path):
        pred = tmp_path / "pred.csv"
        write_signal(workspace["truth"], pred)
        result = runner.invoke(
            main, ["evaluate", "--pred", str(pred),
                   "--truth", str(workspace["truth_path"]),
                   "--threshold", "0.15"]
        )
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert report["n_errors"] == 0
        assert report["mean_precision"] == 1.0
        assert len(report["per_feature_l2"]) == 2

    def test_positivity_threshold(self, runner, workspace, tmp_path):
        pred = tmp_path / "pred.csv"
        write_signal(workspace["truth"], pred)
        result = runner.invoke(
            main, ["evaluate", "--pred", str(pred),
                   "--truth", str(workspace["truth_path"]),
                   "--positivity-threshold", "1.18"]
        )
        report = json.loads(result.output)
        assert report["classification_accuracy"] == 1.0


class TestBenchmark:
    def test_writes_rows(self, runner, workspace, tmp_path):
        out = tmp_path / "bench.csv"
        result = runner.invoke(
            main, ["benchmark", "-g", str(workspace["graph"]),
                   "--truth", str(workspace["truth_path"]), "-k", "4",
                   "--ratios", "0.25,0.5", "--seeds", "2", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "sampling_ratio,method,seed,n_errors,mean_precision"
        assert len(lines) == 1 + 2 * (1 + 2)


def test_data_dir_env_overrides_flag(monkeypatch):
    monkeypatch.delenv("GRAPHSR_DATA_DIR", raising=False)
    assert _resolve_data_dir("flag-dir") == "flag-dir"
    monkeypatch.setenv("GRAPHSR_DATA_DIR", "env-dir")
    assert _resolve_data_dir("flag-dir") == "env-dir"
