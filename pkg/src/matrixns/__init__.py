"""Graph estimation for matrix-shaped observations.

Each observation is a p x q matrix; the package estimates which rows
(or columns) are conditionally dependent by running lasso regressions
of every row variable on the others across all columns and samples,
with a correlation-thresholding baseline, synthetic model generators,
benchmarking, and diagnostics for when recovery is trustworthy.
"""

from ._version import __version__
from .errors import (
    DimensionMismatch,
    EmptyGraph,
    InsufficientSamples,
    InvalidDimension,
    MatrixnsError,
    NonConvergence,
    NonFiniteEncountered,
    NotPositiveDefinite,
    ShapeMismatch,
    SingularInput,
    TargetUnreachable,
    ZeroDiagonal,
    ZeroVariance,
)
from .structures import (
    EdgeSet,
    PrecisionModel,
    edge_set,
    gen_band,
    gen_hub,
    gen_random,
    repair_pd,
    scale_diag_hetero,
)
from .matnorm import (
    GramMatrix,
    MatrixDataset,
    center,
    gram_col,
    gram_row,
    sample,
    stack_columns,
    standardize,
    to_correlation,
    transpose_dataset,
)
from .lasso import (
    LassoPath,
    LassoSolution,
    RegressionProblem,
    lambda_max,
    log2_grid,
    solve,
    solve_path,
)
from .estimators import (
    CombineRule,
    GlassoSolution,
    NodeRegressionResult,
    cv_tune,
    gemini_fit,
    gemini_path,
    graphical_lasso,
    matrixns_fit,
    matrixns_fit_individual,
    matrixns_fit_nodes,
    matrixns_path,
    population_coefficients,
)
from .evaluation import (
    ConfusionPoint,
    RocCurve,
    aggregate,
    confusion,
    partial_auc,
    roc_from_path,
)
from .diagnostics import (
    ConcentrationBound,
    ConditionReport,
    ModelDiagnostics,
    ProbeResult,
    betamin_threshold,
    check_conditions,
    concentration_probe,
    degree_and_bounds,
    incoherence,
    lambda_rule,
)
from .bench import ExperimentConfig, RunRecord, StructureSpec, run_bench

__all__ = [
    "__version__",
    "MatrixnsError",
    "DimensionMismatch",
    "EmptyGraph",
    "InsufficientSamples",
    "InvalidDimension",
    "NonConvergence",
    "NonFiniteEncountered",
    "NotPositiveDefinite",
    "ShapeMismatch",
    "SingularInput",
    "TargetUnreachable",
    "ZeroDiagonal",
    "ZeroVariance",
    "EdgeSet",
    "PrecisionModel",
    "edge_set",
    "gen_band",
    "gen_hub",
    "gen_random",
    "repair_pd",
    "scale_diag_hetero",
    "GramMatrix",
    "MatrixDataset",
    "center",
    "gram_col",
    "gram_row",
    "sample",
    "stack_columns",
    "standardize",
    "to_correlation",
    "transpose_dataset",
    "LassoPath",
    "LassoSolution",
    "RegressionProblem",
    "lambda_max",
    "log2_grid",
    "solve",
    "solve_path",
    "CombineRule",
    "GlassoSolution",
    "NodeRegressionResult",
    "cv_tune",
    "gemini_fit",
    "gemini_path",
    "graphical_lasso",
    "matrixns_fit",
    "matrixns_fit_individual",
    "matrixns_fit_nodes",
    "matrixns_path",
    "population_coefficients",
    "ConfusionPoint",
    "RocCurve",
    "aggregate",
    "confusion",
    "partial_auc",
    "roc_from_path",
    "ConcentrationBound",
    "ConditionReport",
    "ModelDiagnostics",
    "ProbeResult",
    "betamin_threshold",
    "check_conditions",
    "concentration_probe",
    "degree_and_bounds",
    "incoherence",
    "lambda_rule",
    "ExperimentConfig",
    "RunRecord",
    "StructureSpec",
    "run_bench",
]
