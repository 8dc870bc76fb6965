"""Persistent interactive sessions: one human-paced select-and-recover run.

A session binds a graph file, a truncated spectrum, a selection state and a
measurement schema. Every transition is persisted as JSON under the data
directory (floats round-trip exactly through JSON), so a restarted server
resumes every session with bit-identical numerical state.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import DegenerateInputError, GraphSRError
from .graph import Graph, laplacian
from .graphio import read_graph
from .recovery import LassoConfig
from .selector import (
    AuditRecord,
    SelectionState,
    init_state,
    observe_and_update,
    select_next,
)
from .spectral import (
    KernelSpec,
    Spectrum,
    eigendecompose,
    laplacian_hash,
    load_spectrum,
    save_spectrum,
)


class UnknownSessionError(GraphSRError, KeyError):
    """No session with this id."""


class WrongVertexError(GraphSRError, ValueError):
    """Observation targets a vertex other than the pending proposal."""


class SchemaMismatchError(GraphSRError, ValueError):
    """Submitted values do not fit the session's measurement schema."""


class SessionStatus(str, Enum):
    AWAITING_OBSERVATION = "awaiting_observation"
    READY_TO_SELECT = "ready_to_select"
    COMPLETE = "complete"


@dataclass
class MeasurementSchema:
    """Shape and kind of one vertex measurement."""

    p: int
    kind: str = "real"  # "real" | "binary"
    feature_names: list[str] | None = None

    def __post_init__(self):
        if self.p < 1:
            raise SchemaMismatchError(f"schema needs p >= 1, got {self.p}")
        if self.kind not in ("real", "binary"):
            raise SchemaMismatchError(f"unknown value kind {self.kind!r}")
        if self.feature_names is not None and len(self.feature_names) != self.p:
            raise SchemaMismatchError(
                f"{len(self.feature_names)} feature names for p={self.p}"
            )

    def validate_values(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=float).ravel()
        if arr.shape[0] != self.p:
            raise SchemaMismatchError(
                f"expected {self.p} values, got {arr.shape[0]}"
            )
        if not np.all(np.isfinite(arr)):
            raise SchemaMismatchError("values must be finite")
        if self.kind == "binary" and not np.all(np.isin(arr, (0.0, 1.0))):
            raise SchemaMismatchError("binary schema accepts only 0 and 1")
        return arr

    def to_dict(self) -> dict:
        return {"p": self.p, "kind": self.kind, "feature_names": self.feature_names}

    @classmethod
    def from_dict(cls, d: dict) -> "MeasurementSchema":
        return cls(
            p=int(d["p"]),
            kind=str(d.get("kind", "real")),
            feature_names=d.get("feature_names"),
        )


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Session:
    id: str
    graph_path: str
    meta_path: str | None
    k: int
    xi: float
    alpha: float
    m: int
    kernel: str
    schema: MeasurementSchema
    status: SessionStatus
    spectrum_hash: str
    state: SelectionState
    estimate: np.ndarray | None = None
    created_at: str = field(default_factory=_now)
    updated_at: str = field(default_factory=_now)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "graph_path": self.graph_path,
            "meta_path": self.meta_path,
            "k": self.k,
            "xi": self.xi,
            "alpha": self.alpha,
            "m": self.m,
            "kernel": self.kernel,
            "schema": self.schema.to_dict(),
            "status": self.status.value,
            "spectrum_hash": self.spectrum_hash,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "state": {
                "leverage": self.state.leverage.tolist(),
                "scale": self.state.scale,
                "alpha": self.state.alpha,
                "policy": list(self.state.policy),
                "observations": {
                    str(v): obs.tolist() for v, obs in self.state.observations.items()
                },
                "iteration": self.state.iteration,
                "pending": self.state.pending,
                "history": [r.to_dict() for r in self.state.history],
            },
            "estimate": None if self.estimate is None else self.estimate.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Session":
        st = d["state"]
        state = SelectionState(
            leverage=np.asarray(st["leverage"], dtype=float),
            scale=float(st["scale"]),
            alpha=float(st["alpha"]),
            policy=[int(v) for v in st["policy"]],
            observations={
                int(v): np.asarray(obs, dtype=float)
                for v, obs in st["observations"].items()
            },
            iteration=int(st["iteration"]),
            history=[AuditRecord.from_dict(r) for r in st["history"]],
            pending=None if st["pending"] is None else int(st["pending"]),
        )
        est = d.get("estimate")
        return cls(
            id=d["id"],
            graph_path=d["graph_path"],
            meta_path=d.get("meta_path"),
            k=int(d["k"]),
            xi=float(d["xi"]),
            alpha=float(d["alpha"]),
            m=int(d["m"]),
            kernel=d.get("kernel", "heat"),
            schema=MeasurementSchema.from_dict(d["schema"]),
            status=SessionStatus(d["status"]),
            spectrum_hash=d["spectrum_hash"],
            state=state,
            estimate=None if est is None else np.asarray(est, dtype=float),
            created_at=d["created_at"],
            updated_at=d["updated_at"],
        )


@dataclass
class _Runtime:
    session: Session
    graph: Graph
    spectrum: Spectrum


class SessionStore:
    """Creates, persists, resumes and advances sessions under one directory.

    Each session's transitions are serialized by a per-session lock; distinct
    sessions may progress concurrently.
    """

    def __init__(self, data_dir):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        (self.data_dir / "spectra").mkdir(exist_ok=True)
        self._runtimes: dict[str, _Runtime] = {}
        self._registry_lock = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    # -- plumbing ------------------------------------------------------------

    def _lock_for(self, sid: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(sid, threading.Lock())

    def _session_file(self, sid: str) -> Path:
        return self.data_dir / f"{sid}.json"

    def _resolve(self, ref: str) -> Path:
        path = Path(ref)
        return path if path.is_absolute() else self.data_dir / path

    def _persist(self, session: Session) -> None:
        session.updated_at = _now()
        target = self._session_file(session.id)
        tmp = target.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(session.to_dict()) + "\n")
        os.replace(tmp, target)

    def _spectrum_for(self, graph: Graph, k: int) -> tuple[Spectrum, str]:
        lap = laplacian(graph)
        lap_hash = laplacian_hash(lap)
        cache = self.data_dir / "spectra" / f"{lap_hash[:16]}-k{k}.npz"
        if cache.exists():
            return load_spectrum(cache, lap), lap_hash
        spec = eigendecompose(lap, k)
        save_spectrum(spec, cache, lap_hash)
        return spec, lap_hash

    def _load_runtime(self, sid: str) -> _Runtime:
        with self._registry_lock:
            runtime = self._runtimes.get(sid)
        if runtime is not None:
            return runtime
        path = self._session_file(sid)
        if not path.exists():
            raise UnknownSessionError(f"unknown session {sid!r}")
        session = Session.from_dict(json.loads(path.read_text()))
        graph = read_graph(
            self._resolve(session.graph_path),
            meta_path=self._resolve(session.meta_path) if session.meta_path else None,
        )
        spectrum, lap_hash = self._spectrum_for(graph, session.k)
        if lap_hash != session.spectrum_hash:
            raise GraphSRError(
                f"graph file for session {sid} changed since the session was created"
            )
        runtime = _Runtime(session=session, graph=graph, spectrum=spectrum)
        with self._registry_lock:
            self._runtimes.setdefault(sid, runtime)
        return runtime

    def list_sessions(self) -> list[str]:
        return sorted(p.stem for p in self.data_dir.glob("*.json"))

    # -- transitions ---------------------------------------------------------

    def create(
        self,
        graph_ref: str,
        k: int,
        m: int,
        schema: MeasurementSchema,
        xi: float = 0.01,
        alpha: float = 1.0,
        kernel: str = "heat",
        meta_ref: str | None = None,
    ) -> Session:
        graph_path = self._resolve(graph_ref)
        if not graph_path.exists():
            raise DegenerateInputError(f"graph file not found: {graph_ref}")
        meta_path = self._resolve(meta_ref) if meta_ref else None
        graph = read_graph(graph_path, meta_path=meta_path)
        if not 1 <= m <= graph.n_vertices:
            raise DegenerateInputError(
                f"budget m={m} outside [1, {graph.n_vertices}]"
            )
        spectrum, lap_hash = self._spectrum_for(graph, k)
        kern = KernelSpec(kernel)
        state = init_state(spectrum, kern, alpha)
        select_next(state)
        session = Session(
            id=uuid.uuid4().hex,
            graph_path=graph_ref,
            meta_path=meta_ref,
            k=k,
            xi=xi,
            alpha=alpha,
            m=m,
            kernel=kernel,
            schema=schema,
            status=SessionStatus.AWAITING_OBSERVATION,
            spectrum_hash=lap_hash,
            state=state,
        )
        with self._lock_for(session.id):
            self._persist(session)
            with self._registry_lock:
                self._runtimes[session.id] = _Runtime(
                    session=session, graph=graph, spectrum=spectrum
                )
        return session

    def proposal(self, sid: str) -> dict:
        """Current proposed vertex; idempotent while awaiting an observation."""
        with self._lock_for(sid):
            rt = self._load_runtime(sid)
            session = rt.session
            if session.status is SessionStatus.COMPLETE:
                return {
                    "vertex": None,
                    "vertex_meta": None,
                    "delta": None,
                    "status": session.status.value,
                }
            v = session.state.pending
            if v is None:  # ready_to_select: commit the next proposal
                v = select_next(session.state)
                session.status = SessionStatus.AWAITING_OBSERVATION
                self._persist(session)
            meta = None
            if rt.graph.vertex_meta is not None:
                meta = dict(rt.graph.vertex_meta[v])
            return {
                "vertex": v,
                "vertex_meta": meta,
                "delta": float(session.state.leverage[v]),
                "status": session.status.value,
            }

    def observe(self, sid: str, vertex: int, values) -> dict:
        """Accept the pending vertex's measurement and advance the session."""
        with self._lock_for(sid):
            rt = self._load_runtime(sid)
            session = rt.session
            if session.status is SessionStatus.COMPLETE:
                raise WrongVertexError("session is complete; nothing is pending")
            arr = session.schema.validate_values(values)
            if session.state.pending is None or vertex != session.state.pending:
                raise WrongVertexError(
                    f"vertex {vertex} is not the pending proposal "
                    f"({session.state.pending!r})"
                )
            cfg = LassoConfig(xi=session.xi)
            kern = KernelSpec(session.kernel)
            _, result = observe_and_update(
                session.state, rt.spectrum, kern, vertex, arr, cfg=cfg
            )
            session.estimate = result.z_star
            if session.state.iteration >= session.m:
                session.status = SessionStatus.COMPLETE
                nxt = None
            else:
                nxt = select_next(session.state)
                session.status = SessionStatus.AWAITING_OBSERVATION
            self._persist(session)
            meta = None
            if nxt is not None and rt.graph.vertex_meta is not None:
                meta = dict(rt.graph.vertex_meta[nxt])
            return {
                "accepted": True,
                "status": session.status.value,
                "vertex": nxt,
                "vertex_meta": meta,
                "delta": None if nxt is None else float(session.state.leverage[nxt]),
                "observed_count": session.state.iteration,
                "m": session.m,
            }

    def estimate(self, sid: str) -> dict:
        """Current full-graph estimate plus which vertices were observed."""
        with self._lock_for(sid):
            rt = self._load_runtime(sid)
            session = rt.session
            n = rt.graph.n_vertices
            if session.estimate is None:
                values = np.zeros((n, session.schema.p))
            else:
                values = session.estimate
            observed = [v in session.state.observations for v in range(n)]
            return {
                "values": values.tolist(),
                "observed": observed,
                "status": session.status.value,
            }

    def audit(self, sid: str) -> dict:
        with self._lock_for(sid):
            rt = self._load_runtime(sid)
            session = rt.session
            return {
                "id": session.id,
                "status": session.status.value,
                "policy": list(session.state.policy),
                "m": session.m,
                "observed_count": session.state.iteration,
                "schema": session.schema.to_dict(),
                "audit": [r.to_dict() for r in session.state.history],
                "created_at": session.created_at,
                "updated_at": session.updated_at,
            }
