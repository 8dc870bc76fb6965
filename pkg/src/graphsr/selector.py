"""Greedy select-and-recover loop driven by spectral leverage values.

The selection state carries a leverage vector I over the vertices. Each
round: propose the unselected vertex with the largest leverage, obtain its
measurement from an oracle, recover the full signal from everything observed
so far, then discount leverage around the new vertex by the diffusion profile
at a scale proportional to the local recovery residual. The discount constant
eta zeroes the selected vertex's own leverage; entries are clamped to
[0, previous value] so leverage never goes negative and never increases,
which keeps the greedy marginal benefits nonnegative and non-increasing.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    AlreadySelectedError,
    DegenerateInputError,
    DimensionMismatchError,
    ExhaustedError,
    IndexOutOfRangeError,
    NotMostRecentError,
    OracleFailureError,
)
from .recovery import CompleteResult, LassoConfig, Projection, complete
from .spectral import KernelSpec, Spectrum, diffusion_distance, leverage

#: Diffusion self-energy below which the eta division falls back to zero.
ETA_EPS = 1e-12

#: Measurement source: maps a vertex index to its true p-vector.
Oracle = Callable[[int], np.ndarray]


class GroundTruthOracle:
    """Oracle backed by a full N x p ground-truth matrix (batch mode)."""

    def __init__(self, truth: np.ndarray):
        truth = np.asarray(truth, dtype=float)
        if truth.ndim == 1:
            truth = truth[:, None]
        if truth.ndim != 2:
            raise DimensionMismatchError(
                f"ground truth must be N x p, got shape {truth.shape}"
            )
        if not np.all(np.isfinite(truth)):
            raise DimensionMismatchError("ground truth contains non-finite entries")
        self._truth = truth

    @property
    def n_vertices(self) -> int:
        return self._truth.shape[0]

    @property
    def p(self) -> int:
        return self._truth.shape[1]

    def __call__(self, vertex: int) -> np.ndarray:
        return self._truth[int(vertex)].copy()


@dataclass
class AuditRecord:
    """One selection round: who was picked, at what benefit, and the update."""

    iter: int
    vertex: int
    delta: float
    s: float
    eta: float
    residual: float
    wall_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "iter": self.iter,
            "vertex": self.vertex,
            "delta": self.delta,
            "s": self.s,
            "eta": self.eta,
            "residual": self.residual,
            "wall_ms": self.wall_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AuditRecord":
        return cls(
            iter=int(d["iter"]),
            vertex=int(d["vertex"]),
            delta=float(d["delta"]),
            s=float(d["s"]),
            eta=float(d["eta"]),
            residual=float(d["residual"]),
            wall_ms=float(d.get("wall_ms", 0.0)),
        )


@dataclass
class SelectionState:
    """Mutable state of one select-and-recover run.

    ``policy`` lists every vertex committed so far, in order; the last entry
    may still be awaiting its observation (``pending``). ``leverage`` holds
    the current benefit of selecting each remaining vertex; entries for
    already-selected vertices are exactly zero.
    """

    leverage: np.ndarray
    scale: float
    alpha: float
    policy: list[int] = field(default_factory=list)
    observations: dict[int, np.ndarray] = field(default_factory=dict)
    iteration: int = 0
    history: list[AuditRecord] = field(default_factory=list)
    pending: int | None = None

    @property
    def n_vertices(self) -> int:
        return self.leverage.shape[0]


def init_state(spec: Spectrum, kern: KernelSpec, alpha: float = 1.0) -> SelectionState:
    """Fresh state: leverage from the k-band basis at scale 0, empty policy."""
    if not alpha > 0:
        raise DegenerateInputError(f"alpha must be > 0, got {alpha!r}")
    return SelectionState(
        leverage=leverage(spec, kern, 0.0),
        scale=0.0,
        alpha=float(alpha),
    )


def marginal_benefit(state: SelectionState, v: int) -> float:
    """Benefit of selecting v now: its current leverage. Nonnegative."""
    if not 0 <= v < state.n_vertices:
        raise IndexOutOfRangeError(f"vertex {v} outside [0, {state.n_vertices})")
    if v in state.policy:
        raise AlreadySelectedError(f"vertex {v} is already in the policy")
    return float(state.leverage[v])


def select_next(state: SelectionState) -> int:
    """Commit the unselected vertex with the largest leverage to the policy.

    Ties break to the lowest index. Idempotent while an observation is
    pending: the same vertex is returned again without advancing.
    """
    if state.pending is not None:
        return state.pending
    if len(state.policy) >= state.n_vertices:
        raise ExhaustedError("all vertices have been selected")
    masked = state.leverage.copy()
    if state.policy:
        masked[state.policy] = -np.inf
    v = int(np.argmax(masked))
    state.policy.append(v)
    state.pending = v
    return v


def update_after_observation(
    state: SelectionState,
    spec: Spectrum,
    kern: KernelSpec,
    v: int,
    y_v: np.ndarray,
    z_v: np.ndarray,
) -> AuditRecord:
    """Fold the observation at v into the state and discount leverage.

    The new scale is alpha times the l2 recovery residual at v (across the p
    features). Leverage becomes clip(I - eta * D, 0, I) with D the diffusion
    profile at the new scale and eta chosen to zero I(v); the clip keeps
    every entry nonnegative and non-increasing even where D is negative.
    When the self-energy D(v) vanishes, eta falls back to 0 and I(v) is
    zeroed directly.
    """
    if state.pending is None or v != state.pending:
        raise NotMostRecentError(
            f"vertex {v} is not the pending selection "
            f"(pending: {state.pending!r})"
        )
    y = np.asarray(y_v, dtype=float).ravel()
    z = np.asarray(z_v, dtype=float).ravel()
    if y.shape != z.shape:
        raise DimensionMismatchError(
            f"observation has {y.shape[0]} features, estimate has {z.shape[0]}"
        )
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(z))):
        raise DimensionMismatchError("observation or estimate is non-finite")

    residual = float(np.linalg.norm(y - z))
    s_new = state.alpha * residual
    profile = diffusion_distance(spec, kern, s_new, v)
    delta = float(state.leverage[v])
    self_energy = float(profile[v])
    if self_energy > ETA_EPS:
        eta = delta / self_energy
    else:
        eta = 0.0
        warnings.warn(
            f"diffusion self-energy at vertex {v} is ~0; "
            "leverage update degenerates to zeroing the vertex",
            RuntimeWarning,
            stacklevel=2,
        )
    updated = np.clip(state.leverage - eta * profile, 0.0, state.leverage)
    updated[v] = 0.0
    state.leverage = updated
    state.scale = s_new
    state.observations[v] = y.copy()
    state.iteration += 1
    state.pending = None
    record = AuditRecord(
        iter=state.iteration,
        vertex=v,
        delta=delta,
        s=s_new,
        eta=eta,
        residual=residual,
    )
    state.history.append(record)
    return record


def observe_and_update(
    state: SelectionState,
    spec: Spectrum,
    kern: KernelSpec,
    v: int,
    y_v: np.ndarray,
    cfg: LassoConfig | None = None,
) -> tuple[AuditRecord, CompleteResult]:
    """One full round after the oracle answered: recover, then update.

    Recovery uses every observation accumulated so far including the new one,
    in policy order. Shared by the batch loop and the session service so both
    produce bit-identical estimates for identical inputs.
    """
    if state.pending is None or v != state.pending:
        raise NotMostRecentError(
            f"vertex {v} is not the pending selection (pending: {state.pending!r})"
        )
    t0 = time.perf_counter()
    y = np.asarray(y_v, dtype=float).ravel()
    rows = [state.observations[u] for u in state.policy[:-1]]
    rows.append(y)
    proj = Projection(selected=tuple(state.policy), n=spec.n)
    result = complete(spec, proj, np.vstack(rows), cfg=cfg)
    record = update_after_observation(state, spec, kern, v, y, result.z_star[v])
    record.wall_ms = (time.perf_counter() - t0) * 1000.0
    return record, result


@dataclass
class SRResult:
    policy: list[int]
    z_star: np.ndarray
    audit: list[AuditRecord]
    state: SelectionState

    def utility(self) -> float:
        return utility(self.audit)


def run_sr(
    spec: Spectrum,
    kern: KernelSpec,
    oracle: Oracle,
    m: int,
    cfg: LassoConfig | None = None,
    alpha: float = 1.0,
    state: SelectionState | None = None,
) -> SRResult:
    """Run m select/observe/recover/update rounds and return the final
    estimate.

    Pass a previously persisted ``state`` to resume an aborted run; ``m``
    always counts total selections including those already made. An oracle
    exception aborts with OracleFailureError carrying the state, which
    remains valid for resumption.
    """
    if not 1 <= m <= spec.n:
        raise DegenerateInputError(f"budget m={m} outside [1, {spec.n}]")
    if state is None:
        state = init_state(spec, kern, alpha)
    z_star = None
    while state.iteration < m:
        v = select_next(state)
        try:
            y = oracle(v)
        except Exception as exc:
            raise OracleFailureError(
                f"oracle failed at vertex {v}: {exc}", vertex=v, state=state
            ) from exc
        _, result = observe_and_update(state, spec, kern, v, y, cfg=cfg)
        z_star = result.z_star
    if z_star is None:
        raise DegenerateInputError("state already holds >= m observations")
    return SRResult(
        policy=list(state.policy),
        z_star=z_star,
        audit=list(state.history),
        state=state,
    )


def utility(audit: list[AuditRecord]) -> float:
    """Sum of leverage-at-selection over the policy (the greedy objective)."""
    total = 0.0
    for record in audit:
        total += record.delta
    return total
