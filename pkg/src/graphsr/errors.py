"""Exception types shared across the toolkit.

Every error raised on a documented contract path derives from GraphSRError,
so callers (CLI, HTTP service) can map failures to exit codes / status codes
without matching on message text.
"""


class GraphSRError(Exception):
    """Base class for all toolkit errors."""


# --- graph construction ---------------------------------------------------


class IndexOutOfRangeError(GraphSRError, IndexError):
    """A vertex index falls outside [0, N)."""


class SelfLoopError(GraphSRError, ValueError):
    """An edge connects a vertex to itself."""


class NegativeWeightError(GraphSRError, ValueError):
    """An edge weight is negative (or not finite)."""


class ConflictingDuplicateEdgeError(GraphSRError, ValueError):
    """The same unordered vertex pair appears with unequal weights."""


class DegenerateInputError(GraphSRError, ValueError):
    """Input too small or structurally unusable (e.g. fewer than 2 points)."""


class NonPositiveSigmaError(GraphSRError, ValueError):
    """Gaussian kernel bandwidth must be strictly positive."""


class AsymmetricDistanceError(GraphSRError, ValueError):
    """A distance matrix is not symmetric."""


class NegativeDistanceError(GraphSRError, ValueError):
    """A distance matrix contains negative entries."""


# --- file I/O --------------------------------------------------------------


class ParseError(GraphSRError, ValueError):
    """A text input could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"line {line}: "
        super().__init__(where + message)


# --- linear algebra --------------------------------------------------------


class DimensionMismatchError(GraphSRError, ValueError):
    """Operand shapes are inconsistent."""


class ConvergenceFailureError(GraphSRError, RuntimeError):
    """An iterative numerical routine failed to reach its tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (achieved residual {residual:.3e})"
        super().__init__(message)


# --- selection loop --------------------------------------------------------


class AlreadySelectedError(GraphSRError, ValueError):
    """The vertex is already part of the policy."""


class ExhaustedError(GraphSRError, RuntimeError):
    """Every vertex has been selected; nothing left to propose."""


class NotMostRecentError(GraphSRError, ValueError):
    """An observation was supplied for a vertex that is not the pending one."""


class OracleFailureError(GraphSRError, RuntimeError):
    """The measurement oracle raised; the selection state is kept for resume."""

    def __init__(self, message: str, vertex: int | None = None, state=None):
        self.vertex = vertex
        self.state = state
        super().__init__(message)
