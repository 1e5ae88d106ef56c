"""Profile-based bipartite matching via exact maximum-weight reductions.

A profile instance is a bipartite graph with r prioritized integer utility
functions; the profile of a matching is the r-tuple of utility sums, compared
lexicographically. This package finds profile-optimal matchings exactly,
checks user weight functions against the pairwise dominance condition,
decides when a weighted instance reduces to rank-maximal matching, and runs a
reproducible school-choice lottery pipeline on top of the same machinery.
"""

from .core import (
    CompletedInstance,
    Instance,
    Matching,
    Ordering,
    Profile,
    balance,
    cmp_profile,
    complete,
    complete_and_balance,
    format_instance,
    improve,
    improving_pair,
    parse_instance,
    profile_of,
    read_instance,
    restrict,
    write_instance,
)
from .errors import (
    ConditionViolatedError,
    ConfigError,
    InfeasibleAssignmentError,
    LengthMismatchError,
    MissingDistanceError,
    MixedInstancesError,
    NotImprovingError,
    NotPerfectError,
    NotReducibleError,
    ParseError,
    ProfileMatchingError,
    RankCountError,
    RankRangeError,
    TooLargeError,
    UnknownEdgeError,
    ValidationError,
    WeightRangeError,
)
from .oracle import (
    MAX_ORACLE_EDGES,
    brute_force_max_weight,
    brute_force_optimal,
    enumerate_matchings,
)
from .reduction import (
    ReduceResult,
    optimal_matching,
    optimal_matching_with,
    solve_instance,
    solve_instance_with,
)
from .rmcheck import is_rank_maximal, is_rank_maximal_grouped, to_ranks
from .solver import (
    AssignmentProblem,
    AssignmentSolution,
    matching_weight,
    max_weight_matching,
    solve_assignment,
    verify_potentials,
)
from .weights import (
    Counterexample,
    RankSystem,
    WeightAssignment,
    fair_utilities,
    grp_weights,
    lex_weights,
    mcrm_weight,
    mcrm_weights,
    mixed_radix,
    mixed_radix_bound,
    rm_weight_table,
    rm_weights,
    satisfies_condition,
    validate_uniform_bound,
)

__version__ = "0.1.0"

__all__ = [
    "AssignmentProblem",
    "AssignmentSolution",
    "CompletedInstance",
    "ConditionViolatedError",
    "ConfigError",
    "Counterexample",
    "InfeasibleAssignmentError",
    "Instance",
    "LengthMismatchError",
    "MAX_ORACLE_EDGES",
    "Matching",
    "MissingDistanceError",
    "MixedInstancesError",
    "NotImprovingError",
    "NotPerfectError",
    "NotReducibleError",
    "Ordering",
    "ParseError",
    "Profile",
    "ProfileMatchingError",
    "RankCountError",
    "RankRangeError",
    "RankSystem",
    "ReduceResult",
    "TooLargeError",
    "UnknownEdgeError",
    "ValidationError",
    "WeightAssignment",
    "WeightRangeError",
    "balance",
    "brute_force_max_weight",
    "brute_force_optimal",
    "cmp_profile",
    "complete",
    "complete_and_balance",
    "enumerate_matchings",
    "fair_utilities",
    "format_instance",
    "grp_weights",
    "improve",
    "improving_pair",
    "is_rank_maximal",
    "is_rank_maximal_grouped",
    "lex_weights",
    "matching_weight",
    "max_weight_matching",
    "mcrm_weight",
    "mcrm_weights",
    "mixed_radix",
    "mixed_radix_bound",
    "optimal_matching",
    "optimal_matching_with",
    "parse_instance",
    "profile_of",
    "read_instance",
    "restrict",
    "rm_weight_table",
    "rm_weights",
    "satisfies_condition",
    "solve_assignment",
    "solve_instance",
    "solve_instance_with",
    "to_ranks",
    "validate_uniform_bound",
    "verify_potentials",
    "write_instance",
]
