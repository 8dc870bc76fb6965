"""File formats: `.grf` graph files, signal CSVs, vertex metadata JSON.

Graph files are plain text. Line 1 is ``N <count>``; every following line is
``<i> <j> <w>`` with i < j and the weight printed with 17 significant digits,
which round-trips float64 exactly. Lines starting with ``#`` are comments.

Signal files are CSV with a header row ``f0,f1,...`` and one row per vertex;
every cell must be a finite number (unobserved rows are not allowed in
ground-truth files).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParseError
from .graph import Graph, build_from_edges

_WEIGHT_FMT = "%.17g"


def write_graph(g: Graph, path, meta_path=None) -> None:
    """Write a graph to ``path``; optionally write vertex metadata JSON."""
    lines = [f"N {g.n_vertices}"]
    for i, j, w in g.edges:
        lines.append(f"{i} {j} {_WEIGHT_FMT % w}")
    Path(path).write_text("\n".join(lines) + "\n")
    if meta_path is not None and g.vertex_meta is not None:
        write_vertex_meta(g.vertex_meta, meta_path)


def read_graph(path, meta_path=None) -> Graph:
    """Read a `.grf` file; raises ParseError with the offending line number."""
    path = Path(path)
    n_vertices: int | None = None
    edges: list[tuple[int, int, float]] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if n_vertices is None:
            if len(tokens) != 2 or tokens[0] != "N":
                raise ParseError(
                    f"expected header 'N <count>', got {line!r}",
                    line=lineno,
                    path=str(path),
                )
            try:
                n_vertices = int(tokens[1])
            except ValueError:
                raise ParseError(
                    f"bad vertex count {tokens[1]!r}", line=lineno, path=str(path)
                ) from None
            continue
        if len(tokens) != 3:
            raise ParseError(
                f"expected '<i> <j> <w>', got {line!r}", line=lineno, path=str(path)
            )
        try:
            i, j, w = int(tokens[0]), int(tokens[1]), float(tokens[2])
        except ValueError:
            raise ParseError(
                f"bad edge line {line!r}", line=lineno, path=str(path)
            ) from None
        edges.append((i, j, w))
    if n_vertices is None:
        raise ParseError("empty graph file", path=str(path))
    meta = read_vertex_meta(meta_path, n_vertices) if meta_path is not None else None
    return build_from_edges(n_vertices, edges, vertex_meta=meta)


def write_vertex_meta(meta, path) -> None:
    Path(path).write_text(json.dumps([dict(m) for m in meta], indent=2) + "\n")


def read_vertex_meta(path, n_vertices: int):
    """Read per-vertex metadata: a JSON array of N string-valued objects."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", path=str(path)) from None
    if not isinstance(data, list) or len(data) != n_vertices:
        raise ParseError(
            f"metadata must be an array of {n_vertices} objects", path=str(path)
        )
    out = []
    for idx, entry in enumerate(data):
        if not isinstance(entry, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in entry.items()
        ):
            raise ParseError(
                f"metadata entry {idx} is not a string-to-string object",
                path=str(path),
            )
        out.append(entry)
    return tuple(out)


def write_signal(values: np.ndarray, path) -> None:
    """Write an N x p signal matrix as CSV with header ``f0,f1,...``."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ParseError(f"signal must be 2-D, got shape {arr.shape}")
    header = ",".join(f"f{j}" for j in range(arr.shape[1]))
    rows = [header]
    for row in arr:
        rows.append(",".join(_WEIGHT_FMT % v for v in row))
    Path(path).write_text("\n".join(rows) + "\n")


def read_signal(path) -> np.ndarray:
    """Read a signal CSV into an N x p float array.

    The header row is optional on input (always written on output); all data
    rows must have the same width and contain only finite numbers.
    """
    path = Path(path)
    rows: list[list[float]] = []
    width: int | None = None
    first_data_line = True
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        cells = [c.strip() for c in line.split(",")]
        if first_data_line:
            first_data_line = False
            # Header detection: skip the line iff any cell is non-numeric.
            try:
                [float(c) for c in cells]
            except ValueError:
                width = len(cells)
                continue
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(
                f"expected {width} columns, got {len(cells)}",
                line=lineno,
                path=str(path),
            )
        try:
            parsed = [float(c) for c in cells]
        except ValueError:
            raise ParseError(
                f"non-numeric cell in {line!r}", line=lineno, path=str(path)
            ) from None
        if not all(np.isfinite(parsed)):
            raise ParseError(
                "non-finite value (missing rows are not permitted)",
                line=lineno,
                path=str(path),
            )
        rows.append(parsed)
    if not rows:
        raise ParseError("signal file has no data rows", path=str(path))
    return np.asarray(rows, dtype=float)
