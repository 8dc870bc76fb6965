"""Command-line entry points.

Thin wrappers over the library: build a graph file, run a batch
select-and-recover pass against a ground-truth file, score a recovery,
benchmark against the random baseline, or serve the interactive session API.

Exit codes: 0 on success, 2 on input errors, 3 on numerical failures.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import metrics
from .errors import ConvergenceFailureError, GraphSRError, OracleFailureError
from .graph import build_from_distances, build_similarity_graph
from .graphio import read_graph, read_signal, read_vertex_meta, write_graph, write_signal
from .recovery import LassoConfig
from .selector import GroundTruthOracle, run_sr, utility
from .spectral import KernelSpec, eigendecompose
from .graph import laplacian


def _resolve_data_dir(flag_value: str) -> str:
    """GRAPHSR_DATA_DIR takes precedence over the --data-dir flag."""
    return os.environ.get("GRAPHSR_DATA_DIR") or flag_value


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConvergenceFailureError, OracleFailureError) as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(3)
        except GraphSRError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
def main():
    """Adaptive vertex selection and signal recovery on weighted graphs."""


@main.command("build-graph")
@click.option("--features", "features_path", type=click.Path(), default=None,
              help="CSV of N x d feature rows; pairwise Gaussian similarity.")
@click.option("--distances", "distances_path", type=click.Path(), default=None,
              help="CSV of an N x N precomputed distance matrix.")
@click.option("--sigma", type=float, default=1.0, show_default=True,
              help="Gaussian kernel bandwidth.")
@click.option("--knn", type=int, default=None,
              help="Keep an edge iff either endpoint ranks the other in its K nearest.")
@click.option("--meta", "meta_path", type=click.Path(), default=None,
              help="Optional JSON array of per-vertex string metadata.")
@click.option("-o", "--out", "out_path", type=click.Path(), required=True)
@_exit_codes
def build_graph(features_path, distances_path, sigma, knn, meta_path, out_path):
    """Build a .grf graph file from features or a distance matrix."""
    if (features_path is None) == (distances_path is None):
        raise click.UsageError("provide exactly one of --features / --distances")
    if features_path is not None:
        data = read_signal(features_path)
        meta = read_vertex_meta(meta_path, data.shape[0]) if meta_path else None
        g = build_similarity_graph(data, sigma=sigma, knn=knn, vertex_meta=meta)
    else:
        data = read_signal(distances_path)
        meta = read_vertex_meta(meta_path, data.shape[0]) if meta_path else None
        g = build_from_distances(data, sigma=sigma, knn=knn, vertex_meta=meta)
    write_graph(g, out_path)
    click.echo(f"wrote {out_path}: N={g.n_vertices} edges={g.n_edges}")


@main.command("run-sr")
@click.option("-g", "--graph", "graph_path", type=click.Path(), required=True)
@click.option("--truth", "truth_path", type=click.Path(), required=True,
              help="Ground-truth signal CSV serving as the batch oracle.")
@click.option("-m", "budget", type=int, required=True, help="Number of observations.")
@click.option("-k", "band", type=int, required=True, help="Frequency band size.")
@click.option("--xi", type=float, default=0.01, show_default=True,
              help="Sparsity weight of the recovery.")
@click.option("--alpha", type=float, default=1.0, show_default=True,
              help="Scale-update gain.")
@click.option("--kernel", type=click.Choice(["heat", "mexican_hat"]), default="heat",
              show_default=True)
@click.option("--tol", type=float, default=1e-8, show_default=True,
              help="Solver optimality tolerance.")
@click.option("--accelerate", is_flag=True, default=False,
              help="Momentum-accelerated solver (still monotone).")
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="Recovered N x p signal CSV.")
@click.option("--log", "log_path", type=click.Path(), default=None,
              help="Audit log (JSON lines, one record per iteration).")
@_exit_codes
def run_sr_cmd(graph_path, truth_path, budget, band, xi, alpha, kernel, tol,
               accelerate, out_path, log_path):
    """Batch select-and-recover against a ground-truth file."""
    g = read_graph(graph_path)
    truth = read_signal(truth_path)
    if truth.shape[0] != g.n_vertices:
        raise click.UsageError(
            f"truth has {truth.shape[0]} rows, graph has {g.n_vertices} vertices"
        )
    spec = eigendecompose(laplacian(g), band)
    cfg = LassoConfig(xi=xi, tol=tol, accelerate=accelerate)
    result = run_sr(
        spec, KernelSpec(kernel), GroundTruthOracle(truth), budget,
        cfg=cfg, alpha=alpha,
    )
    write_signal(result.z_star, out_path)
    if log_path is not None:
        with open(log_path, "w") as fh:
            for record in result.audit:
                fh.write(json.dumps(record.to_dict()) + "\n")
    click.echo(
        f"wrote {out_path}: N={g.n_vertices} p={truth.shape[1]} m={budget} "
        f"utility={utility(result.audit):.6g}"
    )


@main.command("evaluate")
@click.option("--pred", "pred_path", type=click.Path(), required=True)
@click.option("--truth", "truth_path", type=click.Path(), required=True)
@click.option("--threshold", type=float, default=0.15, show_default=True,
              help="Binarization threshold (strictly greater).")
@click.option("--positivity-threshold", type=float, default=None,
              help="Also classify vertices by row mean above this value.")
@click.option("--sampling-ratio", type=float, default=None)
@click.option("--seed", type=int, default=None)
@_exit_codes
def evaluate(pred_path, truth_path, threshold, positivity_threshold,
             sampling_ratio, seed):
    """Score a recovered signal against ground truth; JSON report on stdout."""
    pred = read_signal(pred_path)
    truth = read_signal(truth_path)
    report = metrics.evaluate_recovery(
        pred, truth,
        threshold=threshold,
        positivity_threshold=positivity_threshold,
        sampling_ratio=sampling_ratio,
        seed=seed,
    )
    click.echo(report.to_json())


@main.command("benchmark")
@click.option("-g", "--graph", "graph_path", type=click.Path(), required=True)
@click.option("--truth", "truth_path", type=click.Path(), required=True)
@click.option("-k", "band", type=int, required=True)
@click.option("--ratios", default="0.2,0.3,0.4,0.6", show_default=True,
              help="Comma-separated sampling ratios.")
@click.option("--seeds", type=int, default=5, show_default=True,
              help="Number of random-baseline seeds per ratio.")
@click.option("--xi", type=float, default=0.01, show_default=True)
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--threshold", type=float, default=0.15, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="CSV of (sampling_ratio, method, seed, n_errors, mean_precision).")
@_exit_codes
def benchmark(graph_path, truth_path, band, ratios, seeds, xi, alpha, threshold,
              out_path):
    """Compare adaptive selection against the uniform-random baseline."""
    g = read_graph(graph_path)
    truth = read_signal(truth_path)
    spec = eigendecompose(laplacian(g), band)
    kern = KernelSpec("heat")
    cfg = LassoConfig(xi=xi)
    truth_bin = metrics.binarize(truth, threshold)
    rows: list[metrics.BenchmarkRow] = []
    for ratio_str in ratios.split(","):
        ratio = float(ratio_str)
        m = max(1, int(round(ratio * g.n_vertices)))
        sr = run_sr(spec, kern, GroundTruthOracle(truth), m, cfg=cfg, alpha=alpha)
        sr_bin = metrics.binarize(sr.z_star, threshold)
        rows.append(metrics.BenchmarkRow(
            sampling_ratio=ratio, method="sr", seed=0,
            n_errors=metrics.count_errors(sr_bin, truth_bin),
            mean_precision=metrics.mean_precision(sr_bin, truth_bin),
        ))
        for seed in range(seeds):
            z = metrics.random_baseline(spec, truth, m, seed, cfg=cfg)
            z_bin = metrics.binarize(z, threshold)
            rows.append(metrics.BenchmarkRow(
                sampling_ratio=ratio, method="random", seed=seed,
                n_errors=metrics.count_errors(z_bin, truth_bin),
                mean_precision=metrics.mean_precision(z_bin, truth_bin),
            ))
    metrics.write_benchmark_csv(rows, out_path)
    click.echo(f"wrote {out_path}: {len(rows)} rows")


@main.command("serve")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", "data_dir", type=click.Path(), default="graphsr-data",
              show_default=True,
              help="Session persistence directory (GRAPHSR_DATA_DIR overrides).")
@click.option("--ui-dir", "ui_dir", type=click.Path(), default=None,
              help="Static annotation-console bundle to serve under /ui/.")
@_exit_codes
def serve(port, host, data_dir, ui_dir):
    """Run the interactive session service."""
    import uvicorn

    from .service import create_app

    data_dir = _resolve_data_dir(data_dir)
    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = str(candidate) if candidate.is_dir() else None
    app = create_app(data_dir, ui_dir=ui_dir)
    click.echo(f"serving on http://{host}:{port} (data dir: {data_dir})")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
