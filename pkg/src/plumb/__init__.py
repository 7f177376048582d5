"""Exact invariants of negative-definite plumbing forests."""

from .catalog import chain_forest, e8_forest, lens_chain, star_forest
from .census import (
    CensusRecord,
    ClassificationReport,
    E8Report,
    census_scan,
    classify,
    enumerate_forests,
    enumerate_trees,
    enumerate_weighted,
    fast_is_rational,
    verify_classification,
    verify_e8_unique,
)
from .engine import (
    ArStatus,
    BasicSet,
    DInvariants,
    SafetyLimitError,
    TerminationResult,
    Verdicts,
    basic_vectors,
    d_invariants,
    is_rational,
    lens_d_multiset,
    lens_d_oracle,
    run_path,
    verdicts,
)
from .forest import (
    ParseError,
    PlumbingForest,
    ReductionTrace,
    canonical_code,
    forest_to_json_obj,
    forest_to_text,
    h1_order,
    intersection_matrix,
    is_minimal,
    is_negative_definite,
    parse_forest,
    parse_forest_json,
    reduce_forest,
    replay_trace,
)
from .lattice import (
    DEFAULT_BUDGET,
    CharVector,
    EnumerationBudgetError,
    NotNegativeDefiniteError,
    QFormContext,
)
from .relations import (
    BoundExceededError,
    ClassTable,
    HFSummary,
    MinimalRelation,
    NotSameClassError,
    UState,
    hf_summary,
    minimal_relation,
    path_weight,
    truncated_classes,
)

__all__ = [
    "ArStatus",
    "BasicSet",
    "BoundExceededError",
    "CensusRecord",
    "CharVector",
    "ClassTable",
    "ClassificationReport",
    "DEFAULT_BUDGET",
    "DInvariants",
    "E8Report",
    "EnumerationBudgetError",
    "HFSummary",
    "MinimalRelation",
    "NotNegativeDefiniteError",
    "NotSameClassError",
    "ParseError",
    "PlumbingForest",
    "QFormContext",
    "ReductionTrace",
    "SafetyLimitError",
    "TerminationResult",
    "UState",
    "Verdicts",
    "basic_vectors",
    "canonical_code",
    "census_scan",
    "chain_forest",
    "classify",
    "d_invariants",
    "e8_forest",
    "enumerate_forests",
    "enumerate_trees",
    "enumerate_weighted",
    "fast_is_rational",
    "forest_to_json_obj",
    "forest_to_text",
    "h1_order",
    "hf_summary",
    "intersection_matrix",
    "is_minimal",
    "is_negative_definite",
    "is_rational",
    "lens_chain",
    "lens_d_multiset",
    "lens_d_oracle",
    "minimal_relation",
    "parse_forest",
    "parse_forest_json",
    "path_weight",
    "reduce_forest",
    "replay_trace",
    "run_path",
    "star_forest",
    "truncated_classes",
    "verdicts",
    "verify_classification",
    "verify_e8_unique",
]

__version__ = "0.1.0"
