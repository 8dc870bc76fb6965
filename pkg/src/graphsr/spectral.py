"""Truncated Laplacian spectrum, graph Fourier transform, kernels, wavelets.

The frequency domain of a graph is spanned by the first k eigenvectors of its
Laplacian. Everything here is deterministic: the decomposition canonicalizes
eigenvector signs (first nonvanishing component made positive) and orders
columns inside degenerate eigenspaces lexicographically, so a given Laplacian
always produces the same basis bit-for-bit.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceFailureError,
    DegenerateInputError,
    DimensionMismatchError,
    IndexOutOfRangeError,
)

#: Gap below which two eigenvalues are treated as one eigenspace.
DEGENERACY_GAP = 1e-8

#: Residual tolerance scale for accepting an eigenpair.
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class Spectrum:
    """First k eigenpairs of a Laplacian: ascending eigenvalues, orthonormal
    eigenvector columns (N x k)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def k(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]


_KERNELS = {
    "heat": lambda x: np.exp(-x),
    "mexican_hat": lambda x: x * np.exp(-x),
}


@dataclass(frozen=True)
class KernelSpec:
    """Band-pass filter g: R+ -> R+ applied to (scale * eigenvalue).

    heat: g(x) = exp(-x); mexican_hat: g(x) = x * exp(-x). Both families are
    parameter-free; the scale enters through the argument.
    """

    family: str = "heat"

    def __post_init__(self):
        if self.family not in _KERNELS:
            raise DegenerateInputError(
                f"unknown kernel family {self.family!r}; "
                f"choose from {sorted(_KERNELS)}"
            )

    def evaluate(self, x) -> np.ndarray:
        return _KERNELS[self.family](np.asarray(x, dtype=float))


def _canonicalize(eigenvalues: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Fix signs and intra-eigenspace column order deterministically."""
    n, cols = vectors.shape
    out = vectors.copy()
    for c in range(cols):
        col = out[:, c]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        pivot = nz[0] if nz.size else 0
        if col[pivot] < 0:
            out[:, c] = -col
    # Lexicographic order inside groups of (near-)equal eigenvalues.
    start = 0
    for c in range(1, cols + 1):
        if c == cols or eigenvalues[c] - eigenvalues[c - 1] >= DEGENERACY_GAP:
            if c - start > 1:
                group = sorted(range(start, c), key=lambda idx: tuple(out[:, idx]))
                out[:, start:c] = out[:, group]
            start = c
    return out


def eigendecompose(lap: np.ndarray, k: int) -> Spectrum:
    """First k eigenpairs of a dense symmetric Laplacian, ascending.

    Uses a full symmetric decomposition (deterministic for a fixed input)
    truncated to k columns. Tiny negative eigenvalues from roundoff are
    clamped to zero. A warning is emitted when the band cut at k splits a
    degenerate eigenspace, since downstream quantities are then sensitive to
    basis rotation inside that eigenspace.
    """
    lap = np.asarray(lap, dtype=float)
    if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise DimensionMismatchError(f"Laplacian must be square, got {lap.shape}")
    n = lap.shape[0]
    if not 1 <= k <= n:
        raise DimensionMismatchError(f"band size k={k} outside [1, {n}]")
    try:
        evals, evecs = np.linalg.eigh(lap)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailureError(f"eigendecomposition failed: {exc}") from exc
    clamp = 1e-10 * max(1.0, float(np.abs(lap).max()))
    evals = evals.copy()
    evals[(evals < 0) & (evals > -clamp)] = 0.0
    evecs = _canonicalize(evals, evecs)
    if k < n and evals[k] - evals[k - 1] < DEGENERACY_GAP:
        warnings.warn(
            f"band cut at k={k} splits a degenerate eigenspace "
            f"(lambda_k={evals[k - 1]:.3e}, lambda_k+1={evals[k]:.3e})",
            RuntimeWarning,
            stacklevel=2,
        )
    lam = np.ascontiguousarray(evals[:k])
    u = np.ascontiguousarray(evecs[:, :k])
    residual = float(np.abs(lap @ u - u * lam).max())
    tol = RESIDUAL_TOL * max(1.0, float(lam[-1]))
    if residual > tol:
        raise ConvergenceFailureError(
            "eigenpair residual above tolerance", residual=residual
        )
    return Spectrum(eigenvalues=lam, eigenvectors=u)


def _as_signal(arr, rows: int, what: str) -> tuple[np.ndarray, bool]:
    """Validate a 1-D or 2-D signal with the given row count."""
    a = np.asarray(arr, dtype=float)
    was_1d = a.ndim == 1
    if was_1d:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] != rows:
        raise DimensionMismatchError(
            f"{what} must have {rows} rows, got shape {np.shape(arr)}"
        )
    if not np.all(np.isfinite(a)):
        raise DimensionMismatchError(f"{what} contains non-finite entries")
    return a, was_1d


def gft_forward(spec: Spectrum, f) -> np.ndarray:
    """Forward graph Fourier transform: coefficients U_k^T f (k x p)."""
    a, was_1d = _as_signal(f, spec.n, "signal")
    out = spec.eigenvectors.T @ a
    return out[:, 0] if was_1d else out


def gft_inverse(spec: Spectrum, fhat) -> np.ndarray:
    """Inverse graph Fourier transform: U_k fhat (N x p)."""
    a, was_1d = _as_signal(fhat, spec.k, "coefficients")
    out = spec.eigenvectors @ a
    return out[:, 0] if was_1d else out


def _localized_profile(spec: Spectrum, kern: KernelSpec, s: float, n: int) -> np.ndarray:
    """sum_l g(s*lambda_l) chi_l(n) chi_l(m) for all m.

    Computed with an elementwise product and a row-wise pairwise sum (not a
    BLAS dot) so that diffusion_distance and leverage share reduction order
    exactly at m = n.
    """
    if not 0 <= n < spec.n:
        raise IndexOutOfRangeError(f"vertex {n} outside [0, {spec.n})")
    if not s >= 0:
        raise DegenerateInputError(f"scale must be >= 0, got {s!r}")
    g = kern.evaluate(s * spec.eigenvalues)
    weights = g * spec.eigenvectors[n]
    return (spec.eigenvectors * weights[None, :]).sum(axis=1)


def wavelet(spec: Spectrum, kern: KernelSpec, s: float, n: int) -> np.ndarray:
    """Spectral wavelet localized at vertex n, evaluated on every vertex."""
    return _localized_profile(spec, kern, s, n)


def wavelet_transform(spec: Spectrum, kern: KernelSpec, f, s: float) -> np.ndarray:
    """Filter a signal through g(s*lambda) in the frequency domain (N x p)."""
    if not s >= 0:
        raise DegenerateInputError(f"scale must be >= 0, got {s!r}")
    a, was_1d = _as_signal(f, spec.n, "signal")
    g = kern.evaluate(s * spec.eigenvalues)
    fhat = spec.eigenvectors.T @ a
    out = spec.eigenvectors @ (g[:, None] * fhat)
    return out[:, 0] if was_1d else out


def leverage(spec: Spectrum, kern: KernelSpec, s: float) -> np.ndarray:
    """Kernel-weighted eigenvector energy at every vertex (all entries >= 0).

    Entry n is sum_l g(s*lambda_l) chi_l(n)^2: how much of a unit impulse at n
    survives reconstruction through the k-band filtered basis. Agrees exactly
    with diffusion_distance(spec, kern, s, n)[n].
    """
    if not s >= 0:
        raise DegenerateInputError(f"scale must be >= 0, got {s!r}")
    g = kern.evaluate(s * spec.eigenvalues)
    u = spec.eigenvectors
    return ((g[None, :] * u) * u).sum(axis=1)


def diffusion_distance(spec: Spectrum, kern: KernelSpec, s: float, n_src: int) -> np.ndarray:
    """Diffusion-type closeness of every vertex to ``n_src`` at scale s.

    Shares its formula with :func:`wavelet`; large values mean observing
    ``n_src`` says a lot about that vertex.
    """
    return _localized_profile(spec, kern, s, n_src)


# --- spectrum cache --------------------------------------------------------


def laplacian_hash(lap: np.ndarray) -> str:
    """Content hash of a dense Laplacian (shape + raw float64 bytes)."""
    lap = np.ascontiguousarray(lap, dtype=float)
    h = hashlib.sha256()
    h.update(str(lap.shape).encode())
    h.update(lap.tobytes())
    return h.hexdigest()


def save_spectrum(spec: Spectrum, path, lap_hash: str) -> None:
    """Dump (eigenvalues, eigenvectors) with the source Laplacian's hash."""
    np.savez(
        path,
        eigenvalues=spec.eigenvalues,
        eigenvectors=spec.eigenvectors,
        lap_hash=np.array(lap_hash),
    )


def load_spectrum(path, lap: np.ndarray | None = None) -> Spectrum:
    """Load a cached spectrum; validate the hash and invariants when the
    Laplacian is supplied."""
    with np.load(path, allow_pickle=False) as data:
        spec = Spectrum(
            eigenvalues=np.ascontiguousarray(data["eigenvalues"]),
            eigenvectors=np.ascontiguousarray(data["eigenvectors"]),
        )
        stored_hash = str(data["lap_hash"])
    if lap is not None:
        if laplacian_hash(lap) != stored_hash:
            raise ConvergenceFailureError(
                "spectrum cache does not match this Laplacian"
            )
        gram = spec.eigenvectors.T @ spec.eigenvectors
        if np.abs(gram - np.eye(spec.k)).max() > 1e-8:
            raise ConvergenceFailureError("cached eigenvectors not orthonormal")
        residual = float(
            np.abs(lap @ spec.eigenvectors - spec.eigenvectors * spec.eigenvalues).max()
        )
        if residual > RESIDUAL_TOL * max(1.0, float(spec.eigenvalues[-1])):
            raise ConvergenceFailureError(
                "cached eigenpairs fail the residual check", residual=residual
            )
    return spec
