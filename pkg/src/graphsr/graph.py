"""Weighted undirected graphs and the combinatorial Laplacian.

Graphs are stored as deduplicated edge lists, one entry per unordered pair
(i, j) with i < j, sorted by (i, j). Construction helpers build graphs from
explicit edge lists, from feature vectors via a Gaussian similarity kernel,
or from a precomputed distance matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetricDistanceError,
    ConflictingDuplicateEdgeError,
    DegenerateInputError,
    IndexOutOfRangeError,
    NegativeDistanceError,
    NegativeWeightError,
    NonPositiveSigmaError,
    SelfLoopError,
)

Edge = tuple[int, int, float]

#: Per-vertex display metadata (labels, image URLs) keyed by string.
VertexMeta = tuple[dict[str, str], ...]


@dataclass(frozen=True)
class Graph:
    """Immutable weighted undirected graph without self-loops.

    ``edges`` holds each unordered pair once as ``(i, j, w)`` with ``i < j``,
    sorted lexicographically, so two graphs compare equal iff they have the
    same vertices, edges and weights bit-for-bit.
    """

    n_vertices: int
    edges: tuple[Edge, ...]
    vertex_meta: VertexMeta | None = None

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        """Dense symmetric adjacency matrix A."""
        a = np.zeros((self.n_vertices, self.n_vertices))
        for i, j, w in self.edges:
            a[i, j] = w
            a[j, i] = w
        return a

    def degrees(self) -> np.ndarray:
        """Weighted degree of every vertex (row sums of A)."""
        return self.adjacency().sum(axis=1)


def build_from_edges(
    n_vertices: int,
    edges,
    vertex_meta: VertexMeta | None = None,
) -> Graph:
    """Build a graph from an iterable of ``(i, j, w)`` triples.

    Edges are validated (index range, no self-loops, nonnegative finite
    weights), canonicalized to ``i < j`` and deduplicated. A pair that appears
    twice with the same weight collapses silently; unequal weights raise
    ConflictingDuplicateEdgeError.
    """
    if n_vertices < 1:
        raise DegenerateInputError(f"graph needs at least 1 vertex, got {n_vertices}")
    seen: dict[tuple[int, int], float] = {}
    for i, j, w in edges:
        i, j = int(i), int(j)
        w = float(w)
        if not (0 <= i < n_vertices and 0 <= j < n_vertices):
            raise IndexOutOfRangeError(
                f"edge ({i}, {j}) outside vertex range [0, {n_vertices})"
            )
        if i == j:
            raise SelfLoopError(f"self-loop at vertex {i}")
        if not math.isfinite(w) or w < 0:
            raise NegativeWeightError(f"edge ({i}, {j}) has invalid weight {w!r}")
        key = (i, j) if i < j else (j, i)
        if key in seen:
            if seen[key] != w:
                raise ConflictingDuplicateEdgeError(
                    f"edge {key} given twice with weights {seen[key]!r} and {w!r}"
                )
            continue
        seen[key] = w
    if vertex_meta is not None:
        vertex_meta = tuple(dict(m) for m in vertex_meta)
        if len(vertex_meta) != n_vertices:
            raise DegenerateInputError(
                f"vertex_meta has {len(vertex_meta)} entries for {n_vertices} vertices"
            )
    edge_tuple = tuple((i, j, seen[(i, j)]) for i, j in sorted(seen))
    return Graph(n_vertices=n_vertices, edges=edge_tuple, vertex_meta=vertex_meta)


def _knn_union_mask(dist2: np.ndarray, knn: int) -> np.ndarray:
    """Boolean mask keeping (i, j) iff j is among i's knn nearest or vice versa.

    Ranking uses the given squared distances, self excluded; ties resolve to
    the lower index (stable sort).
    """
    n = dist2.shape[0]
    keep = np.zeros((n, n), dtype=bool)
    for i in range(n):
        order = np.argsort(dist2[i], kind="stable")
        order = order[order != i][:knn]
        keep[i, order] = True
    return keep | keep.T


def _graph_from_weights(
    weights: np.ndarray,
    rank_dist2: np.ndarray,
    knn: int | None,
    vertex_meta: VertexMeta | None,
) -> Graph:
    n = weights.shape[0]
    if knn is not None:
        if knn < 1:
            raise DegenerateInputError(f"knn must be >= 1, got {knn}")
        keep = _knn_union_mask(rank_dist2, int(knn))
    else:
        keep = np.ones((n, n), dtype=bool)
    edges = [
        (i, j, float(weights[i, j]))
        for i in range(n)
        for j in range(i + 1, n)
        if keep[i, j]
    ]
    return build_from_edges(n, edges, vertex_meta=vertex_meta)


def build_similarity_graph(
    features: np.ndarray,
    sigma: float,
    knn: int | None = None,
    vertex_meta: VertexMeta | None = None,
) -> Graph:
    """Gaussian-kernel similarity graph from an N x d feature matrix.

    Edge weights are ``exp(-||x_i - x_j||^2 / sigma^2)`` for every pair; with
    ``knn`` given, only pairs where either endpoint ranks the other among its
    knn nearest are kept (union symmetrization).
    """
    x = np.asarray(features, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 2:
        raise DegenerateInputError(
            f"need an N x d feature matrix with N >= 2, got shape {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise DegenerateInputError("features contain non-finite entries")
    if not (math.isfinite(sigma) and sigma > 0):
        raise NonPositiveSigmaError(f"sigma must be > 0, got {sigma!r}")
    diff = x[:, None, :] - x[None, :, :]
    dist2 = np.sum(diff * diff, axis=2)
    weights = np.exp(-dist2 / (sigma * sigma))
    return _graph_from_weights(weights, dist2, knn, vertex_meta)


def build_from_distances(
    dist: np.ndarray,
    sigma: float,
    knn: int | None = None,
    vertex_meta: VertexMeta | None = None,
) -> Graph:
    """Gaussian-kernel graph from a precomputed N x N distance matrix.

    Weights are ``exp(-dist_ij^2 / sigma^2)``; the matrix must be symmetric
    with a zero diagonal and nonnegative entries. Same knn contract as
    :func:`build_similarity_graph`.
    """
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DegenerateInputError(f"distance matrix must be square, got {d.shape}")
    if d.shape[0] < 2:
        raise DegenerateInputError("need at least 2 points")
    if not np.all(np.isfinite(d)):
        raise DegenerateInputError("distance matrix contains non-finite entries")
    if np.any(d < 0):
        raise NegativeDistanceError("distance matrix contains negative entries")
    if not np.array_equal(d, d.T):
        raise AsymmetricDistanceError("distance matrix is not symmetric")
    if np.any(np.diag(d) != 0):
        raise DegenerateInputError("distance matrix diagonal must be all zeros")
    if not (math.isfinite(sigma) and sigma > 0):
        raise NonPositiveSigmaError(f"sigma must be > 0, got {sigma!r}")
    d2 = d * d
    weights = np.exp(-d2 / (sigma * sigma))
    return _graph_from_weights(weights, d2, knn, vertex_meta)


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian L = D - A as a dense symmetric matrix."""
    a = g.adjacency()
    lap = -a
    lap[np.diag_indices_from(lap)] = a.sum(axis=1)
    return lap
