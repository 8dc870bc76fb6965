"""graphsr: adaptive vertex selection and bandlimited signal recovery on graphs.

Given a weighted graph and a budget of m vertex observations, the toolkit
decides which vertex to measure next (greedy selection on spectral leverage
values) and recovers the full multivariate signal on all vertices (sparse
estimation in the graph frequency domain). Batch mode reads a ground-truth
file; interactive mode runs the same loop over an HTTP session API with a
human supplying measurements.
"""

from .errors import GraphSRError
from .graph import (
    Graph,
    build_from_distances,
    build_from_edges,
    build_similarity_graph,
    laplacian,
)
from .graphio import read_graph, read_signal, write_graph, write_signal
from .metrics import (
    EvalReport,
    binarize,
    classify_by_row_mean,
    count_errors,
    evaluate_recovery,
    mean_precision,
    per_feature_l2,
    random_baseline,
    random_policy,
)
from .recovery import (
    CompleteResult,
    LassoConfig,
    LassoResult,
    Projection,
    complete,
    lasso_solve,
    project,
    recover,
)
from .selector import (
    AuditRecord,
    GroundTruthOracle,
    SelectionState,
    SRResult,
    init_state,
    marginal_benefit,
    observe_and_update,
    run_sr,
    select_next,
    update_after_observation,
    utility,
)
from .spectral import (
    KernelSpec,
    Spectrum,
    diffusion_distance,
    eigendecompose,
    gft_forward,
    gft_inverse,
    leverage,
    wavelet,
    wavelet_transform,
)

__version__ = "0.1.0"

__all__ = [
    "AuditRecord",
    "CompleteResult",
    "EvalReport",
    "Graph",
    "GraphSRError",
    "GroundTruthOracle",
    "KernelSpec",
    "LassoConfig",
    "LassoResult",
    "Projection",
    "SRResult",
    "SelectionState",
    "Spectrum",
    "binarize",
    "build_from_distances",
    "build_from_edges",
    "build_similarity_graph",
    "classify_by_row_mean",
    "complete",
    "count_errors",
    "diffusion_distance",
    "eigendecompose",
    "evaluate_recovery",
    "gft_forward",
    "gft_inverse",
    "init_state",
    "laplacian",
    "lasso_solve",
    "leverage",
    "marginal_benefit",
    "mean_precision",
    "observe_and_update",
    "per_feature_l2",
    "project",
    "random_baseline",
    "random_policy",
    "read_graph",
    "read_signal",
    "recover",
    "run_sr",
    "select_next",
    "update_after_observation",
    "utility",
    "wavelet",
    "wavelet_transform",
    "write_graph",
    "write_signal",
]
