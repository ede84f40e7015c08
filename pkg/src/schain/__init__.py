"""Semi-supervised clustering of attributed heterogeneous information networks.

Meta-path (PathSim) and attribute similarities are mixed with learned
weights; clusters come from a spectral relaxation and the weights from
Dinkelbach fractional programming, alternating until the penalty settles.
Diagnostics measure cohesiveness and connectedness of a labeling.
"""
__version__ = "0.1.0"

from .diagnostics import (
    ConnectivityGraph,
    QualityReport,
    cohesiveness,
    composite_quality,
    connectedness,
    nmi,
    pairwise_cohesiveness,
    quality_report,
)
from .driver import ClusteringResult, SchainConfig, build_model, penalty, schain_fit, schain_run
from .fractional import FracProgram, build_fractional_objective, dinkelbach, npp_solve
from .hin import (
    ConstraintSet,
    Hin,
    MetaPath,
    NetworkSchema,
    format_hin,
    parse_constraints,
    parse_hin,
    validate_metapath,
)
from .metapath import CountMatrix, Tssn, commuting_matrix, pathsim_matrix, tssn
from .similarity import LinearSimModel, assemble, attribute_components, constraint_matrix, evaluate
from .spectral import ClusterIndicators, kmeans_assign, spectral_step

__all__ = [
    "ClusterIndicators",
    "ClusteringResult",
    "ConnectivityGraph",
    "ConstraintSet",
    "CountMatrix",
    "FracProgram",
    "Hin",
    "LinearSimModel",
    "MetaPath",
    "NetworkSchema",
    "QualityReport",
    "SchainConfig",
    "Tssn",
    "assemble",
    "attribute_components",
    "build_fractional_objective",
    "build_model",
    "cohesiveness",
    "commuting_matrix",
    "composite_quality",
    "connectedness",
    "constraint_matrix",
    "dinkelbach",
    "evaluate",
    "format_hin",
    "kmeans_assign",
    "nmi",
    "npp_solve",
    "pairwise_cohesiveness",
    "parse_constraints",
    "parse_hin",
    "pathsim_matrix",
    "penalty",
    "quality_report",
    "schain_fit",
    "schain_run",
    "spectral_step",
    "tssn",
    "validate_metapath",
]
