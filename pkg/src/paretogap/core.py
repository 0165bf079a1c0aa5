"""Objective-space primitives: canonical cost vectors, Pareto dominance, and
non-dominated / anti-dominated filtering.

All costs are kept on a canonical minimization scale; maximized metrics are
converted once at ingestion (see :func:`canonicalize`) so that every downstream
operation can assume "smaller is better" in every coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "ObjectiveSpec",
    "CostVector",
    "FrontApproximation",
    "canonicalize",
    "dominates",
    "non_dominated_filter",
    "anti_dominated_filter",
    "as_cost_vector",
    "cost_matrix",
]

MINIMIZE = "minimize"
MAXIMIZE = "maximize"


@dataclass(frozen=True)
class ObjectiveSpec:
    """Declaration of one objective: its name, direction, and optional range.

    ``known_range`` is the closed interval the raw metric lives in (e.g. (0, 1)
    for precision). It drives the maximize-to-loss conversion and the default
    reference point.
    """

    name: str
    direction: str = MINIMIZE
    known_range: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("objective name must be nonempty")
        if self.direction not in (MINIMIZE, MAXIMIZE):
            raise ValueError(
                f"objective {self.name!r}: direction must be "
                f"'{MINIMIZE}' or '{MAXIMIZE}', got {self.direction!r}"
            )
        if self.known_range is not None:
            lo, hi = self.known_range
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"objective {self.name!r}: range bounds must be finite")
            if not lo < hi:
                raise ValueError(
                    f"objective {self.name!r}: range lower bound {lo} must be < upper bound {hi}"
                )
            object.__setattr__(self, "known_range", (float(lo), float(hi)))


def validate_objective_list(objectives: Sequence[ObjectiveSpec]) -> tuple[ObjectiveSpec, ...]:
    """Check name uniqueness and return the objectives as a tuple."""
    names = [o.name for o in objectives]
    if len(set(names)) != len(names):
        raise ValueError(f"objective names must be unique, got {names}")
    return tuple(objectives)


@dataclass(frozen=True)
class CostVector:
    """A point in objective space on the canonical minimization scale.

    Entries must be finite; NaN or infinite costs are evaluator bugs and are
    rejected at construction rather than silently dropped later.
    """

    values: tuple[float, ...]

    def __init__(self, values: Iterable[float]):
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ValueError("cost vector must have at least one entry")
        for i, v in enumerate(vals):
            if not math.isfinite(v):
                raise ValueError(f"cost vector entry {i} is not finite: {v!r}")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]


PointLike = Union[CostVector, Sequence[float]]


def as_cost_vector(point: PointLike) -> CostVector:
    """Coerce a raw sequence to a :class:`CostVector` (validating finiteness)."""
    if isinstance(point, CostVector):
        return point
    return CostVector(point)


def cost_matrix(points: Sequence[PointLike]) -> np.ndarray:
    """Stack points into an (n, M) float array, enforcing a uniform dimension."""
    if len(points) == 0:
        raise ValueError("point set must be nonempty")
    vecs = [as_cost_vector(p) for p in points]
    dims = {len(v) for v in vecs}
    if len(dims) != 1:
        raise ValueError(f"points have mixed dimensions {sorted(dims)}")
    return np.array([v.values for v in vecs], dtype=float)


def canonicalize(raw: Sequence[float], specs: Sequence[ObjectiveSpec]) -> CostVector:
    """Convert raw metric values to canonical losses.

    Minimized objectives pass through unchanged. Maximized objectives with a
    known range [lo, hi] map v -> hi - v (keeping [0, 1] metrics in [0, 1]);
    without a range they are negated.
    """
    if len(raw) != len(specs):
        raise ValueError(f"got {len(raw)} values for {len(specs)} objectives")
    out = []
    for i, (v, spec) in enumerate(zip(raw, specs)):
        v = float(v)
        if not math.isfinite(v):
            raise ValueError(f"objective {spec.name!r} (index {i}) is not finite: {v!r}")
        if spec.direction == MINIMIZE:
            out.append(v)
        elif spec.known_range is not None:
            out.append(spec.known_range[1] - v)
        else:
            out.append(-v)
    return CostVector(out)


def dominates(a: PointLike, b: PointLike) -> bool:
    """Strict Pareto dominance under minimization.

    True iff a <= b in every coordinate and a < b in at least one. Equal
    vectors never dominate each other.
    """
    av = as_cost_vector(a).values
    bv = as_cost_vector(b).values
    if len(av) != len(bv):
        raise ValueError(f"dimension mismatch: {len(av)} vs {len(bv)}")
    strict = False
    for x, y in zip(av, bv):
        if x > y:
            return False
        if x < y:
            strict = True
    return strict


def _dominance_masks(mat: np.ndarray) -> np.ndarray:
    """(n, n) boolean matrix where entry [i, j] means point i dominates point j."""
    le = (mat[:, None, :] <= mat[None, :, :]).all(axis=2)
    lt = (mat[:, None, :] < mat[None, :, :]).any(axis=2)
    return le & lt


def non_dominated_filter(points: Sequence[PointLike]) -> list[int]:
    """Indices of all points not dominated by any other point, in input order.

    Exact duplicates of a non-dominated point are all retained: strict
    dominance cannot hold between equal vectors.
    """
    mat = cost_matrix(points)
    dom = _dominance_masks(mat)
    dominated = dom.any(axis=0)
    return [int(i) for i in np.flatnonzero(~dominated)]


def anti_dominated_filter(points: Sequence[PointLike]) -> list[int]:
    """Indices of all points that dominate no other point, in input order.

    This is the non-dominated filter under the reversed dominance relation.
    """
    mat = cost_matrix(points)
    dom = _dominance_masks(mat)
    dominator = dom.any(axis=1)
    return [int(i) for i in np.flatnonzero(~dominator)]


@dataclass(frozen=True)
class FrontApproximation:
    """A set of mutually non-dominated cost vectors with record back-references.

    ``source`` records which cost scale the vectors were taken from
    ("validation" or "test"); ``objectives`` optionally carries the objective
    list the vectors live in.
    """

    points: tuple[tuple[str, CostVector], ...]
    source: str = "validation"
    objectives: tuple[ObjectiveSpec, ...] | None = field(default=None)

    def __post_init__(self) -> None:
        ids = [rid for rid, _ in self.points]
        if len(set(ids)) != len(ids):
            raise ValueError("front record ids must be distinct")
        vecs = [cv for _, cv in self.points]
        if vecs:
            dims = {len(v) for v in vecs}
            if len(dims) != 1:
                raise ValueError(f"front points have mixed dimensions {sorted(dims)}")
            mat = cost_matrix(vecs)
            if _dominance_masks(mat).any():
                raise ValueError("front points must be pairwise non-dominated")
        if self.objectives is not None and vecs and len(self.objectives) != len(vecs[0]):
            raise ValueError("objective list does not match point dimension")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def record_ids(self) -> tuple[str, ...]:
        return tuple(rid for rid, _ in self.points)

    @property
    def cost_vectors(self) -> tuple[CostVector, ...]:
        return tuple(cv for _, cv in self.points)
