"""Identifiability of subspaces from coordinate projections.

Given a rank-r subspace of R^d seen only through its restrictions to small
coordinate sets (equivalently, a rank-r matrix seen only on a mask of
entries), this package decides whether those glimpses pin the subspace down
uniquely, recovers it when they do, validates externally produced
completions against held-out entries, and measures how often random masks
succeed.

The combinatorial core is a counting condition on the sampling pattern:
every set of n columns must together touch at least n + r rows. Patterns
that satisfy it determine the subspace for almost every input; patterns
that fail admit whole families of indistinguishable subspaces, and a
violating column set is reported as the witness.
"""

from .completion import (
    DistinctPatterns,
    FitResult,
    ObservedMatrix,
    SubmatrixReport,
    ValidationCertificate,
    distinct_patterns,
    fits,
    necessary_condition,
    split_for_validation,
    sufficient_condition,
    synth,
    validate_completion,
)
from .experiments import (
    TrialReport,
    estimate_rate,
    identifiability_trial,
    recovery_curve,
    recovery_trial,
)
from .graph import (
    BipartiteGraph,
    build,
    is_r_row_connected,
    max_matching,
    neighborhood,
)
from .linalg import (
    DEFAULT_TOLERANCES,
    Subspace,
    Tolerances,
    random_subspace,
    subspace_distance,
)
from .patterns import (
    ConditionVerdict,
    EnumerationLimitError,
    GuaranteeRangeWarning,
    RegimeError,
    RegimeFlags,
    SamplingPattern,
    block_pattern,
    check_identifiability_bruteforce,
    check_identifiability_fast,
    classify,
    ell_for_identifiability,
    find_valid_submatrix,
    find_violating_subset,
    random_pattern,
    split,
)
from .recovery import (
    GenericityWarning,
    InconsistentObservationsError,
    KernelDimensionError,
    ProjectionObservation,
    RankDeficientProjectionError,
    RecoveryResult,
    assemble_constraints,
    kernel_vector,
    lift,
    project,
    project_onto_pattern,
    recover,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # linear algebra
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "Subspace",
    "subspace_distance",
    "random_subspace",
    # sampling patterns
    "SamplingPattern",
    "RegimeFlags",
    "ConditionVerdict",
    "RegimeError",
    "EnumerationLimitError",
    "GuaranteeRangeWarning",
    "classify",
    "check_identifiability_bruteforce",
    "check_identifiability_fast",
    "find_violating_subset",
    "find_valid_submatrix",
    "split",
    "random_pattern",
    "block_pattern",
    "ell_for_identifiability",
    # bipartite view
    "BipartiteGraph",
    "build",
    "neighborhood",
    "max_matching",
    "is_r_row_connected",
    # recovery
    "ProjectionObservation",
    "RecoveryResult",
    "RankDeficientProjectionError",
    "KernelDimensionError",
    "InconsistentObservationsError",
    "GenericityWarning",
    "project",
    "project_onto_pattern",
    "kernel_vector",
    "lift",
    "assemble_constraints",
    "recover",
    # completion validation
    "ObservedMatrix",
    "FitResult",
    "DistinctPatterns",
    "SubmatrixReport",
    "ValidationCertificate",
    "fits",
    "distinct_patterns",
    "necessary_condition",
    "sufficient_condition",
    "validate_completion",
    "synth",
    "split_for_validation",
    # experiments
    "TrialReport",
    "identifiability_trial",
    "recovery_trial",
    "estimate_rate",
    "recovery_curve",
]
