"""Indexability testing and index computation for finite-state bandit arms.

The package computes Whittle indices of restless bandit arms under the
average-reward and discounted criteria, certifies indexability (or produces a
non-indexability witness), and computes Gittins indices of rested arms.  The
core engine removes one state per iteration and keeps the required linear
algebra current through Sherman-Morrison updates, with an optional blocked
variant that periodically refreshes the full working matrix.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .arm import (
    ArmError,
    BadBandwidth,
    BadDiscount,
    ChainKind,
    ChainVerdict,
    NonStochasticRow,
    RestlessArm,
    ShapeMismatch,
    arm_to_dict,
    classify_policy_chain,
    generate_banded,
    generate_dense_uniform,
    is_weakly_communicating,
    load_arm,
    save_arm,
    validate_arm,
)
from .index_solver import (
    AverageReward,
    Block,
    Continue,
    Criterion,
    Cubic,
    DEFAULT_TOLERANCE,
    Discounted,
    Finished,
    IndexResult,
    Indexable,
    Multichain,
    MultichainPolicy,
    MultichainSignal,
    Naive,
    NonIndexable,
    NotWeaklyCommunicating,
    SolverOptions,
    SolverState,
    TOLERANCE_ENV_VAR,
    Variant,
    advantage_at,
    compute_indices,
    default_recompute_count,
    gittins_indices,
    init_state,
    iterate,
    update_x_block,
    update_x_cubic,
)
from .linalg import (
    InnerSingular,
    PIVOT_RTOL,
    Singular,
    build_A_matrix,
    build_discounted_A_matrix,
    lu_factor_checked,
    solve_dense,
    woodbury_block_update,
)
from .oracle import (
    AffineVector,
    NonMonotone,
    PolicyEvaluation,
    TooLarge,
    UnsupportedByOracle,
    enumerate_bellman_optimal,
    evaluate_policy,
    naive_whittle,
    oracle_discounted_index,
    oracle_gittins,
    oracle_indexability,
)

__all__ = [
    "__version__",
    "ArmError",
    "BadBandwidth",
    "BadDiscount",
    "ChainKind",
    "ChainVerdict",
    "NonStochasticRow",
    "RestlessArm",
    "ShapeMismatch",
    "arm_to_dict",
    "classify_policy_chain",
    "generate_banded",
    "generate_dense_uniform",
    "is_weakly_communicating",
    "load_arm",
    "save_arm",
    "validate_arm",
    "AverageReward",
    "Block",
    "Continue",
    "Criterion",
    "Cubic",
    "DEFAULT_TOLERANCE",
    "Discounted",
    "Finished",
    "IndexResult",
    "Indexable",
    "Multichain",
    "MultichainPolicy",
    "MultichainSignal",
    "Naive",
    "NonIndexable",
    "NotWeaklyCommunicating",
    "SolverOptions",
    "SolverState",
    "TOLERANCE_ENV_VAR",
    "Variant",
    "advantage_at",
    "compute_indices",
    "default_recompute_count",
    "gittins_indices",
    "init_state",
    "iterate",
    "update_x_block",
    "update_x_cubic",
    "InnerSingular",
    "PIVOT_RTOL",
    "Singular",
    "build_A_matrix",
    "build_discounted_A_matrix",
    "lu_factor_checked",
    "solve_dense",
    "woodbury_block_update",
    "AffineVector",
    "NonMonotone",
    "PolicyEvaluation",
    "TooLarge",
    "UnsupportedByOracle",
    "enumerate_bellman_optimal",
    "evaluate_policy",
    "naive_whittle",
    "oracle_discounted_index",
    "oracle_gittins",
    "oracle_indexability",
]
