"""Observation projection, frequency-domain sparse recovery, reconstruction.

Given rows observed at the selected vertices, the signal is recovered by
solving, independently per feature column,

    min_z  ||A z - y||^2  +  xi * ||z||_1      with  A = P U_k,

(no 1/2 on the quadratic, so the scalar soft threshold sits at xi/2) and
mapping the coefficients back through the inverse graph Fourier transform.
The solver is proximal gradient descent with step 1/(2 sigma_max(A)^2),
stopping when the subgradient optimality certificate holds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DimensionMismatchError, IndexOutOfRangeError
from .spectral import Spectrum, gft_inverse


@dataclass(frozen=True)
class Projection:
    """Ordered distinct vertex indices defining the row-selection operator."""

    selected: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "selected", tuple(int(v) for v in self.selected))
        if self.n < 1:
            raise DegenerateInputError(f"projection needs n >= 1, got {self.n}")
        for v in self.selected:
            if not 0 <= v < self.n:
                raise IndexOutOfRangeError(f"vertex {v} outside [0, {self.n})")
        if len(set(self.selected)) != len(self.selected):
            raise DegenerateInputError("selected vertices must be distinct")

    @property
    def m(self) -> int:
        return len(self.selected)

    def matrix(self) -> np.ndarray:
        """Dense m x N 0/1 matrix with row i selecting vertex selected[i]."""
        p = np.zeros((self.m, self.n))
        p[np.arange(self.m), list(self.selected)] = 1.0
        return p


def project(proj: Projection, f) -> np.ndarray:
    """Select the observed rows: row i of the output is row selected[i] of f."""
    a = np.asarray(f, dtype=float)
    if a.ndim != 2 or a.shape[0] != proj.n:
        raise DimensionMismatchError(
            f"signal must be {proj.n} x p, got shape {a.shape}"
        )
    return a[list(proj.selected)].copy()


@dataclass(frozen=True)
class LassoConfig:
    """Sparse-recovery knobs.

    xi weights the l1 penalty; tol scales both the optimality certificate and
    the coefficient-change stop; accelerate enables a monotone momentum
    variant (objective still never increases).
    """

    xi: float = 0.01
    tol: float = 1e-8
    max_iter: int = 100_000
    accelerate: bool = False
    record_objective: bool = False

    def __post_init__(self):
        if not self.xi >= 0:
            raise DegenerateInputError(f"xi must be >= 0, got {self.xi!r}")
        if not self.tol > 0:
            raise DegenerateInputError(f"tol must be > 0, got {self.tol!r}")
        if self.max_iter < 1:
            raise DegenerateInputError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass
class LassoResult:
    coeffs: np.ndarray
    converged: bool
    n_iter: int
    objectives: np.ndarray | None = None


def _soft(x: np.ndarray, thresh: float) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - thresh, 0.0)


def lasso_solve(design, y, cfg: LassoConfig | None = None, z0=None) -> LassoResult:
    """Minimize ||A z - y||^2 + xi ||z||_1 column-independently.

    Accepts y of shape (m,) or (m, p); the returned coefficients match. Each
    returned column satisfies, with c = tol * (1 + ||A^T y||_inf),

        |2 A^T (A z - y) + xi sign(z)| <= c   on nonzero entries,
        |2 A^T (A z - y)| <= xi + c           on zero entries,

    unless max_iter is exhausted, in which case ``converged`` is False and the
    best (last, by monotone descent) iterate is returned.
    """
    if cfg is None:
        cfg = LassoConfig()
    a = np.asarray(design, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatchError(f"design must be 2-D, got shape {a.shape}")
    m, k = a.shape
    ycol = np.asarray(y, dtype=float)
    was_1d = ycol.ndim == 1
    if was_1d:
        ycol = ycol[:, None]
    if ycol.ndim != 2 or ycol.shape[0] != m:
        raise DimensionMismatchError(
            f"y must have {m} rows to match the design, got shape {np.shape(y)}"
        )
    p = ycol.shape[1]

    if z0 is None:
        z = np.zeros((k, p))
    else:
        z = np.array(z0, dtype=float).reshape(k, p).copy()

    gram = a.T @ a
    b = a.T @ ycol
    yy = np.sum(ycol * ycol, axis=0)
    smax2 = float(np.linalg.eigvalsh(gram)[-1]) if k > 0 and m > 0 else 0.0

    if m == 0 or smax2 <= 0.0:
        # Empty or all-zero design: the quadratic term is constant in z.
        z = np.zeros((k, p))
        coeffs = z[:, 0] if was_1d else z
        return LassoResult(coeffs=coeffs, converged=True, n_iter=0)

    step = 1.0 / (2.0 * smax2)
    shrink = step * cfg.xi
    kkt_tol = cfg.tol * (1.0 + np.abs(b).max(axis=0))  # per column

    def objective_cols(zz, gz):
        quad = np.sum(zz * gz, axis=0) - 2.0 * np.sum(zz * b, axis=0) + yy
        return quad + cfg.xi * np.abs(zz).sum(axis=0)

    def kkt_cols(zz, grad):
        nz = zz != 0.0
        viol = np.where(
            nz,
            np.abs(grad + cfg.xi * np.sign(zz)),
            np.maximum(np.abs(grad) - cfg.xi, 0.0),
        )
        return viol.max(axis=0) <= kkt_tol

    # Columns are solved independently; each freezes at the first iterate
    # satisfying its certificate, so joint and per-column runs agree.
    objectives: list[float] = []
    momentum = cfg.accelerate
    w = z.copy() if momentum else None
    t_mom = np.ones(p)
    active = np.ones(p, dtype=bool)
    converged = False
    n_iter = 0
    gz = gram @ z
    obj = objective_cols(z, gz)
    for _ in range(cfg.max_iter):
        if cfg.record_objective:
            objectives.append(float(obj.sum()))
        grad = 2.0 * (gz - b)
        active &= ~kkt_cols(z, grad)
        if not active.any():
            converged = True
            break
        z_new = z.copy()
        if momentum:
            grad_w = 2.0 * (gram @ w - b)
            cand = _soft(w - step * grad_w, shrink)
            obj_cand = objective_cols(cand, gram @ cand)
            accept = active & (obj_cand <= obj)
            fallback = active & ~accept
            z_new[:, accept] = cand[:, accept]
            if fallback.any():
                plain = _soft(z - step * grad, shrink)
                z_new[:, fallback] = plain[:, fallback]
            t_next = np.where(
                accept, 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_mom * t_mom)), 1.0
            )
            factor = np.where(accept, (t_mom - 1.0) / t_next, 0.0)
            w = z_new + factor[None, :] * (z_new - z)
            t_mom = t_next
        else:
            plain = _soft(z - step * grad, shrink)
            z_new[:, active] = plain[:, active]
        gz = gram @ z_new
        z = z_new
        obj = objective_cols(z, gz)
        n_iter += 1
    else:
        grad = 2.0 * (gz - b)
        active &= ~kkt_cols(z, grad)
        converged = not active.any()
    if cfg.record_objective and (not objectives or objectives[-1] != float(obj.sum())):
        objectives.append(float(obj.sum()))

    coeffs = z[:, 0] if was_1d else z
    return LassoResult(
        coeffs=coeffs,
        converged=converged,
        n_iter=n_iter,
        objectives=np.asarray(objectives) if cfg.record_objective else None,
    )


def recover(spec: Spectrum, zhat) -> np.ndarray:
    """Map frequency coefficients back to the vertex domain: U_k zhat."""
    return gft_inverse(spec, zhat)


@dataclass
class CompleteResult:
    """End-to-end recovery output: vertex-domain estimate plus diagnostics."""

    z_star: np.ndarray
    coeffs: np.ndarray
    converged: bool
    n_iter: int


def complete(
    spec: Spectrum,
    proj: Projection,
    y,
    cfg: LassoConfig | None = None,
    z0=None,
) -> CompleteResult:
    """Recover the full N x p signal from observations at proj.selected.

    Composition of lasso_solve on the design P U_k (the selected eigenvector
    rows) and the inverse transform. With no observations the coefficient
    estimate is defined as zero, so the recovery is the zero signal.
    """
    if proj.n != spec.n:
        raise DimensionMismatchError(
            f"projection is over {proj.n} vertices, spectrum over {spec.n}"
        )
    ymat = np.asarray(y, dtype=float)
    if ymat.ndim != 2 or ymat.shape[0] != proj.m:
        raise DimensionMismatchError(
            f"observations must be {proj.m} x p, got shape {ymat.shape}"
        )
    design = spec.eigenvectors[list(proj.selected), :]
    res = lasso_solve(design, ymat, cfg=cfg, z0=z0)
    z_star = recover(spec, res.coeffs)
    return CompleteResult(
        z_star=z_star,
        coeffs=res.coeffs,
        converged=res.converged,
        n_iter=res.n_iter,
    )
