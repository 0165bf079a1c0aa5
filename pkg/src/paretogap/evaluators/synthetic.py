"""Synthetic bi-objective problems with controllable validation-to-test shift.

Each problem maps a point in [0, 1]^d through a smooth trade-off surface to a
pair of losses in [0, 1]^2, then perturbs the pair twice with independent
seeded noise: once for the "validation" measurement and once for the "test"
measurement. With zero noise the two measurements coincide exactly, so any
nonzero approximation gap downstream is attributable to the injected
estimation error alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from ..core import CostVector, ObjectiveSpec
from ..search import ConfigurationSpace, ParameterSpec

__all__ = [
    "SURFACES",
    "SyntheticProblem",
    "SyntheticEvaluator",
    "evaluate_synthetic",
    "embed_assignment",
]


def _split_input(x: np.ndarray) -> tuple[float, float]:
    """First coordinate drives the trade-off position, the rest the penalty."""
    u = float(x[0])
    q = float(x[1:].mean()) if x.shape[0] > 1 else 0.0
    return u, q


def _convex(x: np.ndarray) -> tuple[float, float]:
    u, q = _split_input(x)
    g = 1.0 + q
    return u * g / 2.0, (1.0 - math.sqrt(u)) * g / 2.0


def _concave(x: np.ndarray) -> tuple[float, float]:
    u, q = _split_input(x)
    g = 1.0 + q
    return u * g / 2.0, (1.0 - u * u) * g / 2.0


def _plane(x: np.ndarray) -> tuple[float, float]:
    u, _ = _split_input(x)
    return u, 1.0 - u


# Smooth maps [0,1]^d -> [0,1]^2. "plane" is the degenerate all-on-front case.
SURFACES: dict[str, Callable[[np.ndarray], tuple[float, float]]] = {
    "convex": _convex,
    "concave": _concave,
    "plane": _plane,
}

_OBJECTIVES = (
    ObjectiveSpec("f1", "minimize", (0.0, 1.0)),
    ObjectiveSpec("f2", "minimize", (0.0, 1.0)),
)


@dataclass(frozen=True)
class SyntheticProblem:
    surface: str = "convex"
    dimension: int = 3
    noise_sigma: float = 0.0

    def __post_init__(self) -> None:
        if self.surface not in SURFACES:
            raise ValueError(
                f"unknown surface {self.surface!r}; available: {', '.join(sorted(SURFACES))}"
            )
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not (math.isfinite(self.noise_sigma) and self.noise_sigma >= 0.0):
            raise ValueError("noise_sigma must be finite and >= 0")

    @property
    def objectives(self) -> tuple[ObjectiveSpec, ...]:
        return _OBJECTIVES

    def space(self) -> ConfigurationSpace:
        """Canonical input space: x0..x{d-1}, each continuous on [0, 1]."""
        return ConfigurationSpace(
            tuple(
                ParameterSpec.continuous(f"x{i}", 0.0, 1.0) for i in range(self.dimension)
            )
        )


def _input_vector(problem: SyntheticProblem, assignment: Mapping[str, object]) -> np.ndarray:
    names = [f"x{i}" for i in range(problem.dimension)]
    missing = [n for n in names if n not in assignment]
    if missing:
        raise ValueError(f"assignment missing inputs: {', '.join(missing)}")
    x = np.empty(problem.dimension)
    for i, n in enumerate(names):
        v = float(assignment[n])
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"input {n}={v} outside [0, 1]")
        x[i] = v
    return x


def evaluate_synthetic(
    problem: SyntheticProblem, assignment: Mapping[str, object], seed: int
) -> tuple[CostVector, CostVector]:
    """(validation, test) cost pair for one input point.

    Validation and test perturbations come from independent sub-streams of
    ``seed`` so the pair is reproducible and the two measurement errors are
    uncorrelated. Perturbed losses are clamped back to [0, 1].
    """
    x = _input_vector(problem, assignment)
    base = np.array(SURFACES[problem.surface](x))
    if problem.noise_sigma == 0.0:
        exact = CostVector(base)
        return exact, exact
    noisy = []
    for stream in (1, 2):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, stream)))
        eps = rng.normal(0.0, problem.noise_sigma, size=2)
        noisy.append(CostVector(np.clip(base + eps, 0.0, 1.0)))
    return noisy[0], noisy[1]


def embed_assignment(
    space: ConfigurationSpace, assignment: Mapping[str, object]
) -> dict[str, float]:
    """Map an assignment from any space onto the canonical [0, 1]^d inputs.

    Lets search-space fixtures without a native evaluator (e.g. the bundled
    random-forest space) drive a synthetic problem of matching dimension:
    categorical values become their level index on [0, 1], bounded numeric
    parameters are rescaled (log-scale ones in log space).
    """
    out: dict[str, float] = {}
    for i, p in enumerate(space):
        if p.name not in assignment:
            raise ValueError(f"assignment missing parameter {p.name!r}")
        value = assignment[p.name]
        if p.kind == "categorical":
            if value not in p.values:
                raise ValueError(f"parameter {p.name!r}: unknown value {value!r}")
            k = len(p.values)
            t = 0.5 if k == 1 else p.values.index(value) / (k - 1)
        elif p.scale == "log":
            t = (math.log(float(value)) - math.log(p.lo)) / (math.log(p.hi) - math.log(p.lo))
        else:
            t = (float(value) - p.lo) / (p.hi - p.lo)
        if not (-1e-12 <= t <= 1.0 + 1e-12):
            raise ValueError(f"parameter {p.name!r}: value {value!r} outside its bounds")
        out[f"x{i}"] = min(max(t, 0.0), 1.0)
    return out


class SyntheticEvaluator:
    """Adapter making a synthetic problem consumable by the search loop.

    With no explicit space, assignments must use the problem's canonical
    x0..x{d-1} inputs; with a space, assignments are embedded first and the
    space size must match the problem dimension.
    """

    def __init__(self, problem: SyntheticProblem, space: ConfigurationSpace | None = None):
        if space is not None and len(space) != problem.dimension:
            raise ValueError(
                f"space has {len(space)} parameters but problem dimension is "
                f"{problem.dimension}"
            )
        self.problem = problem
        self.space = space if space is not None else problem.space()
        self._embed = space is not None and space != problem.space()

    @property
    def objectives(self) -> tuple[ObjectiveSpec, ...]:
        return self.problem.objectives

    @property
    def evaluator_id(self) -> str:
        p = self.problem
        return f"synthetic:{p.surface}?d={p.dimension}&sigma={format(p.noise_sigma, 'g')}"

    def __call__(
        self, assignment: Mapping[str, object], seed: int
    ) -> tuple[CostVector, CostVector]:
        if self._embed:
            assignment = embed_assignment(self.space, assignment)
        return evaluate_synthetic(self.problem, assignment, seed)
