"""paretogap: generalization-aware evaluation of multi-objective
hyperparameter search.

Core ideas: validation-set Pareto fronts re-judged on test costs split into an
optimistic and a pessimistic front; their hypervolume difference (the
approximation gap) measures how well a front generalizes, and three criteria
compare two runs without pretending test-set reshuffling away.
"""

from .archive import (
    ArchiveManifest,
    RunArchive,
    dump_archive,
    load_archive,
    load_record_csv,
    read_archive,
    write_archive,
)
from .core import (
    CostVector,
    FrontApproximation,
    ObjectiveSpec,
    anti_dominated_filter,
    canonicalize,
    dominates,
    non_dominated_filter,
)
from .hypervolume import (
    HV_ABS_TOL,
    ReferencePoint,
    default_reference,
    hypervolume_2d,
    hypervolume_mc,
    hypervolume_nd,
)
from .protocol import (
    FIRST_BETTER,
    INCOMPARABLE,
    SECOND_BETTER,
    ComparisonVerdict,
    EvaluationRecord,
    GapReport,
    compare_dominance,
    compare_gap,
    compare_hv,
    gap_report,
    naive_test_front,
    optimistic_front,
    pessimistic_front,
    validation_front,
)
from .search import (
    ConfigurationSpace,
    ParameterSpec,
    SpaceParseError,
    checkpoint_reports,
    format_space,
    load_builtin_space,
    parse_space,
    parse_space_file,
    run_random_search,
    sample,
)

__version__ = "0.1.0"

__all__ = [
    "ArchiveManifest",
    "RunArchive",
    "dump_archive",
    "load_archive",
    "load_record_csv",
    "read_archive",
    "write_archive",
    "CostVector",
    "FrontApproximation",
    "ObjectiveSpec",
    "anti_dominated_filter",
    "canonicalize",
    "dominates",
    "non_dominated_filter",
    "HV_ABS_TOL",
    "ReferencePoint",
    "default_reference",
    "hypervolume_2d",
    "hypervolume_mc",
    "hypervolume_nd",
    "FIRST_BETTER",
    "INCOMPARABLE",
    "SECOND_BETTER",
    "ComparisonVerdict",
    "EvaluationRecord",
    "GapReport",
    "compare_dominance",
    "compare_gap",
    "compare_hv",
    "gap_report",
    "naive_test_front",
    "optimistic_front",
    "pessimistic_front",
    "validation_front",
    "ConfigurationSpace",
    "ParameterSpec",
    "SpaceParseError",
    "checkpoint_reports",
    "format_space",
    "load_builtin_space",
    "parse_space",
    "parse_space_file",
    "run_random_search",
    "sample",
    "__version__",
]
