"""Matrix mechanism for answering workloads of linear counting queries under differential privacy."""
from .analysis import (
    ErrorProfile,
    ErrorReport,
    error_profile,
    max_error,
    profile_equivalent,
    query_error,
    range_query_errors,
    strategy_from_profile,
    svb_sensitivity,
    total_error,
)
from .errors import MatMechError, NonConvergenceWarning
from .linalg import Strategy, l1_sensitivity, l2_column_bound, pseudo_inverse, rank
from .mechanism import (
    NoisyAnswer,
    PrivacyParams,
    estimate_counts,
    gaussian_mechanism,
    laplace_mechanism,
    matrix_mechanism,
)
from .optimize import (
    OptimizeResult,
    OptimizerOptions,
    augment,
    auto_augment,
    l2_optimal_profile,
    min_error_descent,
    min_sensitivity,
    svb_optimal_strategy,
)
from .strategies import (
    build_strategy,
    decomposed_strategy,
    hierarchical_strategy,
    identity_strategy,
    wavelet_strategy,
)
from .workloads import all_predicate_queries, all_range_queries, identity_workload, workload_reduce

__version__ = "0.1.0"
