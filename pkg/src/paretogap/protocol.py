"""Generalization protocol for multi-objective search results.

A run produces evaluation records holding validation and test costs per
configuration. The validation front is the usual Pareto filter on validation
costs. Moving to test costs, the members of that front are re-judged twice:

* optimistic front: validation-front members whose test costs are not
  dominated by any other member's test costs,
* pessimistic front: validation-front members whose test costs dominate no
  other member's test costs.

The gap between the two fronts' hypervolumes (the approximation gap) measures
how much of the validation front survives the move to test data; zero means
the front generalizes intact. Three comparison criteria between two runs are
built on top: hypervolume difference, front dominance, and gap size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import (
    CostVector,
    FrontApproximation,
    ObjectiveSpec,
    anti_dominated_filter,
    dominates,
    non_dominated_filter,
)
from .hypervolume import HV_ABS_TOL, ReferencePoint, RefLike, as_reference, hypervolume_nd

__all__ = [
    "EvaluationRecord",
    "GapReport",
    "ComparisonVerdict",
    "FIRST_BETTER",
    "SECOND_BETTER",
    "INCOMPARABLE",
    "validation_front",
    "optimistic_front",
    "pessimistic_front",
    "naive_test_front",
    "gap_report",
    "compare_hv",
    "compare_dominance",
    "compare_gap",
]

FIRST_BETTER = "first_better"
SECOND_BETTER = "second_better"
INCOMPARABLE = "incomparable"

CRITERION_HV = "hv_difference"
CRITERION_DOMINANCE = "front_dominance"
CRITERION_GAP = "gap"


@dataclass(frozen=True)
class EvaluationRecord:
    """One evaluated configuration.

    ``failure`` is set (and both cost vectors are None) when the evaluator
    raised instead of producing costs; such records count against the budget
    but never enter fronts. ``test_costs`` may be None for validation-only
    archives.
    """

    record_id: str
    assignment: Mapping[str, object]
    validation_costs: CostVector | None
    test_costs: CostVector | None
    seed: int
    metadata: Mapping[str, str] = field(default_factory=dict)
    failure: str | None = None

    def __post_init__(self) -> None:
        if not self.record_id:
            raise ValueError("record_id must be nonempty")
        if self.failure is not None:
            if self.validation_costs is not None or self.test_costs is not None:
                raise ValueError(
                    f"record {self.record_id!r}: failed records carry no costs"
                )
            return
        if self.validation_costs is None:
            raise ValueError(
                f"record {self.record_id!r}: validation costs required unless failed"
            )
        if self.test_costs is not None and len(self.test_costs) != len(self.validation_costs):
            raise ValueError(
                f"record {self.record_id!r}: validation and test costs differ in dimension"
            )

    @property
    def evaluated(self) -> bool:
        return self.failure is None


def _evaluated(records: Sequence[EvaluationRecord]) -> list[EvaluationRecord]:
    if not records:
        raise ValueError("record list must be nonempty")
    ids = [r.record_id for r in records]
    if len(set(ids)) != len(ids):
        raise ValueError("record ids must be unique within a run")
    usable = [r for r in records if r.evaluated]
    if not usable:
        raise ValueError("no successfully evaluated records")
    dims = {len(r.validation_costs) for r in usable}
    if len(dims) != 1:
        raise ValueError(f"records have mixed objective dimensions {sorted(dims)}")
    return usable


def _require_test_costs(records: Sequence[EvaluationRecord], context: str) -> None:
    missing = [r.record_id for r in records if r.test_costs is None]
    if missing:
        raise ValueError(f"{context}: records missing test costs: {', '.join(missing)}")


def validation_front(records: Sequence[EvaluationRecord]) -> FrontApproximation:
    """Pareto front of all evaluated records under their validation costs."""
    usable = _evaluated(records)
    idx = non_dominated_filter([r.validation_costs for r in usable])
    return FrontApproximation(
        tuple((usable[i].record_id, usable[i].validation_costs) for i in idx),
        source="validation",
    )


def _validation_members(records: Sequence[EvaluationRecord]) -> list[EvaluationRecord]:
    vfront = validation_front(records)
    by_id = {r.record_id: r for r in records}
    members = [by_id[rid] for rid in vfront.record_ids]
    _require_test_costs(members, "validation-front member")
    return members


def optimistic_front(records: Sequence[EvaluationRecord]) -> FrontApproximation:
    """Validation-front members still non-dominated under test costs."""
    members = _validation_members(records)
    idx = non_dominated_filter([r.test_costs for r in members])
    return FrontApproximation(
        tuple((members[i].record_id, members[i].test_costs) for i in idx),
        source="test",
    )


def pessimistic_front(records: Sequence[EvaluationRecord]) -> FrontApproximation:
    """Validation-front members that dominate no other member under test costs."""
    members = _validation_members(records)
    idx = anti_dominated_filter([r.test_costs for r in members])
    return FrontApproximation(
        tuple((members[i].record_id, members[i].test_costs) for i in idx),
        source="test",
    )


def naive_test_front(records: Sequence[EvaluationRecord]) -> FrontApproximation:
    """Pareto filter applied to test costs of all evaluated records.

    This is the flawed shortcut the protocol replaces: it both overestimates
    the achieved volume and rewards selecting against the test set. Provided
    for demonstration and comparison only.
    """
    usable = _evaluated(records)
    _require_test_costs(usable, "naive test front")
    idx = non_dominated_filter([r.test_costs for r in usable])
    return FrontApproximation(
        tuple((usable[i].record_id, usable[i].test_costs) for i in idx),
        source="test",
    )


@dataclass(frozen=True)
class GapReport:
    """Hypervolume summary of one run: validation, optimistic, pessimistic, gap."""

    validation_hv: float
    optimistic_hv: float
    pessimistic_hv: float
    approximation_gap: float
    reference: ReferencePoint
    validation_front_size: int
    optimistic_front_size: int
    pessimistic_front_size: int

    def __post_init__(self) -> None:
        if self.pessimistic_hv < -HV_ABS_TOL:
            raise ValueError("pessimistic hypervolume must be nonnegative")
        if self.optimistic_hv < self.pessimistic_hv - HV_ABS_TOL:
            raise ValueError(
                "optimistic hypervolume cannot fall below pessimistic: "
                f"{self.optimistic_hv} < {self.pessimistic_hv}"
            )
        if self.approximation_gap < 0.0:
            raise ValueError("approximation gap must be nonnegative")
        expected = self.optimistic_hv - self.pessimistic_hv
        if abs(self.approximation_gap - max(expected, 0.0)) > HV_ABS_TOL:
            raise ValueError("approximation gap inconsistent with its hypervolumes")


def gap_report(records: Sequence[EvaluationRecord], ref: RefLike) -> GapReport:
    """Compute the full protocol summary for one record set.

    The validation front is recomputed internally from the raw records; a
    caller-supplied front is deliberately not accepted, since a subset chosen
    with knowledge of test costs would smuggle test information into the
    validation-side quantities.
    """
    refp = as_reference(ref)
    vfront = validation_front(records)
    if len(vfront.cost_vectors[0]) != len(refp):
        raise ValueError(
            f"records are {len(vfront.cost_vectors[0])}-D but reference is {len(refp)}-D"
        )
    ofront = optimistic_front(records)
    pfront = pessimistic_front(records)
    validation_hv = hypervolume_nd(vfront, refp)
    optimistic_hv = hypervolume_nd(ofront, refp)
    pessimistic_hv = hypervolume_nd(pfront, refp)
    gap = optimistic_hv - pessimistic_hv
    if gap < -HV_ABS_TOL:
        raise AssertionError(
            f"optimistic hypervolume below pessimistic by {-gap}; "
            "this indicates a hypervolume bug"
        )
    return GapReport(
        validation_hv=validation_hv,
        optimistic_hv=optimistic_hv,
        pessimistic_hv=pessimistic_hv,
        approximation_gap=max(gap, 0.0),
        reference=refp,
        validation_front_size=len(vfront),
        optimistic_front_size=len(ofront),
        pessimistic_front_size=len(pfront),
    )


@dataclass(frozen=True)
class ComparisonVerdict:
    """Outcome of one comparison criterion with the scalars or counts behind it."""

    criterion: str
    outcome: str
    evidence: Mapping[str, object]


def compare_hv(a: GapReport, b: GapReport) -> ComparisonVerdict:
    """Hypervolume-difference criterion.

    The first run wins only when its pessimistic hypervolume strictly exceeds
    the second's optimistic one (and vice versa); overlapping intervals are
    honestly incomparable, including exact ties.
    """
    if a.reference != b.reference:
        raise ValueError(
            f"reference points differ: {a.reference.values} vs {b.reference.values}"
        )
    if a.pessimistic_hv > b.optimistic_hv:
        outcome = FIRST_BETTER
    elif b.pessimistic_hv > a.optimistic_hv:
        outcome = SECOND_BETTER
    else:
        outcome = INCOMPARABLE
    return ComparisonVerdict(
        criterion=CRITERION_HV,
        outcome=outcome,
        evidence={
            "a_pessimistic_hv": a.pessimistic_hv,
            "a_optimistic_hv": a.optimistic_hv,
            "b_pessimistic_hv": b.pessimistic_hv,
            "b_optimistic_hv": b.optimistic_hv,
        },
    )


def compare_dominance(
    a_pessimistic: FrontApproximation, b_optimistic: FrontApproximation
) -> ComparisonVerdict:
    """Front-dominance criterion, one-sided.

    first_better iff every point of B's optimistic front is strictly dominated
    by at least one point of A's pessimistic front; otherwise incomparable.
    Swap the arguments (B's pessimistic vs A's optimistic) for the other
    direction. Strict coverage is deliberate: identical fronts must not count
    as dominating each other.
    """
    if len(a_pessimistic) == 0 or len(b_optimistic) == 0:
        raise ValueError("front comparison requires nonempty fronts")
    if (
        a_pessimistic.objectives is not None
        and b_optimistic.objectives is not None
        and a_pessimistic.objectives != b_optimistic.objectives
    ):
        raise ValueError("fronts have different objective lists")
    a_points = a_pessimistic.cost_vectors
    covered = 0
    for b_point in b_optimistic.cost_vectors:
        if any(dominates(a_point, b_point) for a_point in a_points):
            covered += 1
    outcome = FIRST_BETTER if covered == len(b_optimistic) else INCOMPARABLE
    return ComparisonVerdict(
        criterion=CRITERION_DOMINANCE,
        outcome=outcome,
        evidence={"covered": covered, "total": len(b_optimistic)},
    )


def compare_gap(a: GapReport, b: GapReport, tie_epsilon: float = 0.0) -> ComparisonVerdict:
    """Approximation-gap criterion: the smaller gap is the more robust run.

    Gaps within ``tie_epsilon`` of each other are incomparable; any tolerance
    used is recorded in the verdict evidence.
    """
    if tie_epsilon < 0.0:
        raise ValueError("tie_epsilon must be nonnegative")
    if a.approximation_gap < b.approximation_gap - tie_epsilon:
        outcome = FIRST_BETTER
    elif b.approximation_gap < a.approximation_gap - tie_epsilon:
        outcome = SECOND_BETTER
    else:
        outcome = INCOMPARABLE
    return ComparisonVerdict(
        criterion=CRITERION_GAP,
        outcome=outcome,
        evidence={
            "a_gap": a.approximation_gap,
            "b_gap": b.approximation_gap,
            "tie_epsilon": tie_epsilon,
        },
    )
