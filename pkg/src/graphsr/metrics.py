"""Recovery-quality metrics and the uniform-random selection baseline."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DimensionMismatchError
from .recovery import LassoConfig, Projection, complete
from .spectral import Spectrum


def _pair(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(pred)
    b = np.asarray(truth)
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"prediction shape {a.shape} != truth shape {b.shape}"
        )
    return a, b


def binarize(values, threshold: float) -> np.ndarray:
    """1 where the value is strictly greater than the threshold, else 0."""
    return (np.asarray(values, dtype=float) > threshold).astype(np.int_)


def count_errors(pred, truth) -> int:
    """Number of disagreeing cells between two binary matrices."""
    a, b = _pair(pred, truth)
    return int(np.sum(a != b))


def mean_precision(pred, truth, empty_value: float = 1.0) -> float:
    """Unweighted mean over feature columns of TP / (TP + FP).

    A column with no positive predictions emits no false positives; its
    precision is defined as ``empty_value`` (default 1.0).
    """
    a, b = _pair(pred, truth)
    if a.ndim == 1:
        a = a[:, None]
        b = b[:, None]
    tp = np.sum((a == 1) & (b == 1), axis=0).astype(float)
    fp = np.sum((a == 1) & (b == 0), axis=0).astype(float)
    denom = tp + fp
    per_col = np.where(denom > 0, tp / np.where(denom > 0, denom, 1.0), empty_value)
    return float(per_col.mean())


def per_feature_l2(pred, truth) -> np.ndarray:
    """l2 norm of the per-column recovery error, one entry per feature."""
    a, b = _pair(pred, truth)
    if a.ndim == 1:
        a = a[:, None]
        b = b[:, None]
    return np.linalg.norm(a.astype(float) - b.astype(float), axis=0)


def classify_by_row_mean(values, threshold: float, truth_labels=None):
    """Binary label per vertex: 1 iff the mean over features is strictly
    greater than the threshold. Returns (labels, accuracy) where accuracy is
    None unless truth labels are supplied."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    labels = (arr.mean(axis=1) > threshold).astype(np.int_)
    accuracy = None
    if truth_labels is not None:
        t = np.asarray(truth_labels).astype(np.int_)
        if t.shape != labels.shape:
            raise DimensionMismatchError(
                f"truth labels shape {t.shape} != labels shape {labels.shape}"
            )
        accuracy = float(np.mean(labels == t))
    return labels, accuracy


def random_policy(n: int, m: int, seed: int) -> list[int]:
    """m distinct vertices drawn uniformly without replacement, seeded."""
    if not 1 <= m <= n:
        raise DegenerateInputError(f"budget m={m} outside [1, {n}]")
    rng = np.random.default_rng(seed)
    return [int(v) for v in rng.choice(n, size=m, replace=False)]


def random_baseline(
    spec: Spectrum,
    truth: np.ndarray,
    m: int,
    seed: int,
    cfg: LassoConfig | None = None,
) -> np.ndarray:
    """Recovery from a uniformly random policy, same solver as the adaptive
    path; the head-to-head baseline."""
    truth = np.asarray(truth, dtype=float)
    selected = random_policy(spec.n, m, seed)
    proj = Projection(selected=tuple(selected), n=spec.n)
    return complete(spec, proj, truth[selected], cfg=cfg).z_star


@dataclass
class EvalReport:
    """Aggregate quality report for one recovered signal."""

    n_errors: int
    mean_precision: float
    per_feature_l2: list[float]
    classification_accuracy: float | None = None
    sampling_ratio: float | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "n_errors": self.n_errors,
            "mean_precision": self.mean_precision,
            "per_feature_l2": self.per_feature_l2,
            "classification_accuracy": self.classification_accuracy,
            "sampling_ratio": self.sampling_ratio,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def evaluate_recovery(
    pred: np.ndarray,
    truth: np.ndarray,
    threshold: float = 0.15,
    positivity_threshold: float | None = None,
    sampling_ratio: float | None = None,
    seed: int | None = None,
) -> EvalReport:
    """Standard report: thresholded error count, mean precision, per-feature
    l2 error, and optionally row-mean classification accuracy against labels
    derived from the truth at ``positivity_threshold``."""
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    pred_bin = binarize(pred, threshold)
    truth_bin = binarize(truth, threshold)
    accuracy = None
    if positivity_threshold is not None:
        truth_labels, _ = classify_by_row_mean(truth, positivity_threshold)
        _, accuracy = classify_by_row_mean(pred, positivity_threshold, truth_labels)
    return EvalReport(
        n_errors=count_errors(pred_bin, truth_bin),
        mean_precision=mean_precision(pred_bin, truth_bin),
        per_feature_l2=[float(v) for v in per_feature_l2(pred, truth)],
        classification_accuracy=accuracy,
        sampling_ratio=sampling_ratio,
        seed=seed,
    )


@dataclass
class BenchmarkRow:
    sampling_ratio: float
    method: str
    seed: int
    n_errors: int
    mean_precision: float


def write_benchmark_csv(rows: list[BenchmarkRow], path) -> None:
    """CSV dump of benchmark rows, one line per (ratio, method, seed)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sampling_ratio", "method", "seed", "n_errors", "mean_precision"])
        for r in rows:
            writer.writerow(
                [r.sampling_ratio, r.method, r.seed, r.n_errors, r.mean_precision]
            )
