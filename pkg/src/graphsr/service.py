"""HTTP surface for interactive sessions.

Thin FastAPI wrapper over :class:`graphsr.sessions.SessionStore`; every
numerical decision lives in the core package. Unknown sessions map to 404,
protocol violations (wrong vertex, double observe) to 409, schema and input
problems to 422.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict, Field

from .errors import GraphSRError
from .sessions import (
    MeasurementSchema,
    SchemaMismatchError,
    SessionStore,
    UnknownSessionError,
    WrongVertexError,
)


class SchemaModel(BaseModel):
    p: int = Field(gt=0)
    kind: Literal["real", "binary"] = "real"
    feature_names: list[str] | None = None


class CreateSessionRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    graph: str
    meta: str | None = None
    k: int = Field(gt=0)
    xi: float = Field(default=0.01, ge=0)
    alpha: float = Field(default=1.0, gt=0)
    m: int = Field(gt=0)
    measurement_schema: SchemaModel = Field(alias="schema")
    kernel: Literal["heat", "mexican_hat"] = "heat"


class CreateSessionResponse(BaseModel):
    id: str
    vertex: int
    delta: float
    status: str


class ProposalResponse(BaseModel):
    vertex: int | None
    vertex_meta: dict[str, str] | None
    delta: float | None
    status: str


class ObserveRequest(BaseModel):
    vertex: int
    values: list[float]


class ObserveResponse(BaseModel):
    accepted: bool
    status: str
    vertex: int | None
    vertex_meta: dict[str, str] | None
    delta: float | None
    observed_count: int
    m: int


class EstimateResponse(BaseModel):
    values: list[list[float]]
    observed: list[bool]
    status: str


class AuditEntry(BaseModel):
    iter: int
    vertex: int
    delta: float
    s: float
    eta: float
    residual: float
    wall_ms: float


class SessionStateResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    id: str
    status: str
    policy: list[int]
    m: int
    observed_count: int
    measurement_schema: SchemaModel = Field(alias="schema")
    audit: list[AuditEntry]
    created_at: str
    updated_at: str


def create_app(data_dir, ui_dir=None) -> FastAPI:
    """Build the service around a session store rooted at ``data_dir``."""
    store = SessionStore(data_dir)
    app = FastAPI(title="graphsr session service", version="0.1.0")
    app.state.store = store

    @app.exception_handler(UnknownSessionError)
    async def _unknown(request: Request, exc: UnknownSessionError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(WrongVertexError)
    async def _conflict(request: Request, exc: WrongVertexError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(SchemaMismatchError)
    async def _schema(request: Request, exc: SchemaMismatchError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(GraphSRError)
    async def _bad_input(request: Request, exc: GraphSRError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", response_model=CreateSessionResponse)
    def create_session(req: CreateSessionRequest):
        schema = MeasurementSchema(
            p=req.measurement_schema.p,
            kind=req.measurement_schema.kind,
            feature_names=req.measurement_schema.feature_names,
        )
        session = store.create(
            graph_ref=req.graph,
            meta_ref=req.meta,
            k=req.k,
            m=req.m,
            schema=schema,
            xi=req.xi,
            alpha=req.alpha,
            kernel=req.kernel,
        )
        first = session.state.pending
        return CreateSessionResponse(
            id=session.id,
            vertex=int(first),
            delta=float(session.state.leverage[first]),
            status=session.status.value,
        )

    @app.get("/sessions/{sid}/next", response_model=ProposalResponse)
    def next_proposal(sid: str):
        return ProposalResponse(**store.proposal(sid))

    @app.post("/sessions/{sid}/observe", response_model=ObserveResponse)
    def observe(sid: str, req: ObserveRequest):
        return ObserveResponse(**store.observe(sid, req.vertex, req.values))

    @app.get("/sessions/{sid}/estimate", response_model=EstimateResponse)
    def estimate(sid: str):
        return EstimateResponse(**store.estimate(sid))

    @app.get("/sessions/{sid}/state", response_model=SessionStateResponse)
    def session_state(sid: str):
        return SessionStateResponse(**store.audit(sid))

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
