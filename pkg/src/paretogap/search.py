"""Declarative configuration spaces and seeded random search.

Reproducibility contract: every record's seed is derived from
(master_seed, record_index) via a counter-based split, so the record list is
identical whether evaluations run sequentially or in parallel, in any order.
Sub-stream 0 of a record seed is reserved for drawing the configuration;
evaluators derive their own noise streams from sub-streams 1 and up.
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from .core import CostVector, as_cost_vector
from .hypervolume import RefLike
from .protocol import EvaluationRecord, GapReport, gap_report

__all__ = [
    "ParameterSpec",
    "ConfigurationSpace",
    "SpaceParseError",
    "sample",
    "run_random_search",
    "checkpoint_reports",
    "parse_space",
    "parse_space_file",
    "format_space",
    "load_builtin_space",
    "BUILTIN_SPACES",
]

CATEGORICAL = "categorical"
CONTINUOUS = "continuous"
INTEGER = "integer"

BUILTIN_SPACES = ("linear_model", "random_forest")


@dataclass(frozen=True)
class ParameterSpec:
    """One search-space parameter: categorical, continuous, or integer.

    Categorical values are plain strings (consumers parse them as needed);
    continuous parameters sample uniformly on a linear or logarithmic scale.
    """

    name: str
    kind: str
    values: tuple[str, ...] | None = None
    lo: float | None = None
    hi: float | None = None
    scale: str | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("parameter name must be nonempty")
        if self.kind == CATEGORICAL:
            if not self.values:
                raise ValueError(f"parameter {self.name!r}: categorical needs values")
            if len(set(self.values)) != len(self.values):
                raise ValueError(f"parameter {self.name!r}: categorical values must be distinct")
            if self.lo is not None or self.hi is not None or self.scale is not None:
                raise ValueError(f"parameter {self.name!r}: categorical takes no bounds")
        elif self.kind == CONTINUOUS:
            self._check_bounds()
            if self.scale not in ("linear", "log"):
                raise ValueError(f"parameter {self.name!r}: scale must be linear or log")
            if self.scale == "log" and self.lo <= 0:
                raise ValueError(f"parameter {self.name!r}: log scale requires lo > 0")
        elif self.kind == INTEGER:
            self._check_bounds()
            if self.lo != int(self.lo) or self.hi != int(self.hi):
                raise ValueError(f"parameter {self.name!r}: integer bounds must be whole")
            if self.scale is not None:
                raise ValueError(f"parameter {self.name!r}: integer takes no scale")
        else:
            raise ValueError(f"parameter {self.name!r}: unknown kind {self.kind!r}")

    def _check_bounds(self) -> None:
        if self.lo is None or self.hi is None or self.values is not None:
            raise ValueError(f"parameter {self.name!r}: {self.kind} needs lo/hi bounds only")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"parameter {self.name!r}: bounds must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"parameter {self.name!r}: lo {self.lo} must be < hi {self.hi}")

    @staticmethod
    def categorical(name: str, values: Sequence[str]) -> "ParameterSpec":
        return ParameterSpec(name, CATEGORICAL, values=tuple(str(v) for v in values))

    @staticmethod
    def continuous(name: str, lo: float, hi: float, scale: str = "linear") -> "ParameterSpec":
        return ParameterSpec(name, CONTINUOUS, lo=float(lo), hi=float(hi), scale=scale)

    @staticmethod
    def integer(name: str, lo: int, hi: int) -> "ParameterSpec":
        return ParameterSpec(name, INTEGER, lo=float(lo), hi=float(hi))

    def contains(self, value: object) -> bool:
        if self.kind == CATEGORICAL:
            return value in self.values
        if self.kind == INTEGER:
            return isinstance(value, (int, np.integer)) and self.lo <= value <= self.hi
        return isinstance(value, (int, float, np.floating)) and self.lo <= value <= self.hi


@dataclass(frozen=True)
class ConfigurationSpace:
    parameters: tuple[ParameterSpec, ...]

    def __post_init__(self) -> None:
        names = [p.name for p in self.parameters]
        if len(set(names)) != len(names):
            raise ValueError(f"parameter names must be unique, got {names}")

    def __len__(self) -> int:
        return len(self.parameters)

    def __iter__(self):
        return iter(self.parameters)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parameters)


def sample(space: ConfigurationSpace, rng: np.random.Generator) -> dict[str, object]:
    """Draw one assignment, consuming the generator in parameter order."""
    out: dict[str, object] = {}
    for p in space:
        if p.kind == CATEGORICAL:
            out[p.name] = p.values[int(rng.integers(len(p.values)))]
        elif p.kind == INTEGER:
            out[p.name] = int(rng.integers(int(p.lo), int(p.hi) + 1))
        elif p.scale == "log":
            out[p.name] = float(np.exp(rng.uniform(np.log(p.lo), np.log(p.hi))))
        else:
            out[p.name] = float(rng.uniform(p.lo, p.hi))
    return out


def record_seed(master_seed: int, index: int) -> int:
    """Counter-based per-record seed: stable under reordering and parallelism."""
    ss = np.random.SeedSequence(entropy=(master_seed, index))
    return int(ss.generate_state(1, np.uint64)[0])


Evaluator = Callable[[dict[str, object], int], tuple[CostVector, CostVector | None]]


def _evaluate_one(
    space: ConfigurationSpace, evaluator: Evaluator, master_seed: int, index: int
) -> EvaluationRecord:
    seed = record_seed(master_seed, index)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, 0)))
    assignment = sample(space, rng)
    record_id = f"r{index:06d}"
    try:
        validation, test = evaluator(assignment, seed)
    except Exception as exc:  # failed evaluations stay in the budget, marked
        message = re.sub(r"\s+", " ", f"{type(exc).__name__}: {exc}").strip()
        return EvaluationRecord(
            record_id=record_id,
            assignment=assignment,
            validation_costs=None,
            test_costs=None,
            seed=seed,
            failure=message or type(exc).__name__,
        )
    return EvaluationRecord(
        record_id=record_id,
        assignment=assignment,
        validation_costs=as_cost_vector(validation),
        test_costs=None if test is None else as_cost_vector(test),
        seed=seed,
    )


def run_random_search(
    space: ConfigurationSpace,
    evaluator: Evaluator,
    budget: int,
    master_seed: int,
    workers: int = 1,
) -> list[EvaluationRecord]:
    """Evaluate ``budget`` uniformly sampled configurations.

    The result is fully determined by (space, evaluator, budget, master_seed);
    ``workers`` only changes how the work is scheduled. Evaluator exceptions
    produce failed records rather than aborting the run.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if master_seed < 0:
        raise ValueError("master seed must be nonnegative")
    if workers <= 1:
        return [_evaluate_one(space, evaluator, master_seed, i) for i in range(budget)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_evaluate_one, space, evaluator, master_seed, i)
            for i in range(budget)
        ]
        return [f.result() for f in futures]


def checkpoint_reports(
    records: Sequence[EvaluationRecord],
    budgets: Sequence[int],
    ref: RefLike,
) -> list[tuple[int, GapReport]]:
    """Gap reports over cumulative record prefixes, one per budget.

    Prefixes of a single run stand in for separate runs at each budget; the
    archive at budget b is exactly the first b evaluations.
    """
    if not budgets:
        raise ValueError("budgets must be nonempty")
    if any(b2 <= b1 for b1, b2 in zip(budgets, budgets[1:])):
        raise ValueError(f"budgets must be strictly ascending, got {list(budgets)}")
    for b in budgets:
        if b < 1 or b > len(records):
            raise ValueError(f"budget {b} outside 1..{len(records)}")
    return [(b, gap_report(records[:b], ref)) for b in budgets]


class SpaceParseError(ValueError):
    """Space definition syntax error, carrying 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _space_tokens(text_line: str) -> list[tuple[str, int]]:
    """(token, 1-based column) pairs; '#' starts a comment."""
    code = text_line.split("#", 1)[0]
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", code)]


def _parse_float(token: str, lineno: int, col: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise SpaceParseError(f"{what} must be a number, got {token!r}", lineno, col) from None
    if not math.isfinite(value):
        raise SpaceParseError(f"{what} must be finite, got {token!r}", lineno, col)
    return value


def parse_space(text: str) -> ConfigurationSpace:
    """Parse the line-oriented space format.

    Grammar (one parameter per line, '#' comments, blank lines ignored)::

        <name> categorical <value> <value> [...]
        <name> continuous <lo> <hi> [linear|log]
        <name> integer <lo> <hi>
    """
    params: list[ParameterSpec] = []
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = _space_tokens(raw)
        if not tokens:
            continue
        (name, name_col), rest = tokens[0], tokens[1:]
        if not rest:
            raise SpaceParseError("missing parameter kind", lineno, name_col + len(name))
        if name in seen:
            raise SpaceParseError(
                f"duplicate parameter {name!r} (first defined on line {seen[name]})",
                lineno,
                name_col,
            )
        (kind, kind_col), args = rest[0], rest[1:]
        try:
            if kind == CATEGORICAL:
                if not args:
                    raise SpaceParseError("categorical needs at least one value", lineno, kind_col)
                params.append(ParameterSpec.categorical(name, [t for t, _ in args]))
            elif kind == CONTINUOUS:
                if len(args) not in (2, 3):
                    raise SpaceParseError(
                        "continuous takes: <lo> <hi> [linear|log]", lineno, kind_col
                    )
                lo = _parse_float(args[0][0], lineno, args[0][1], "lower bound")
                hi = _parse_float(args[1][0], lineno, args[1][1], "upper bound")
                scale = "linear"
                if len(args) == 3:
                    scale = args[2][0]
                    if scale not in ("linear", "log"):
                        raise SpaceParseError(
                            f"scale must be linear or log, got {scale!r}", lineno, args[2][1]
                        )
                params.append(ParameterSpec.continuous(name, lo, hi, scale))
            elif kind == INTEGER:
                if len(args) != 2:
                    raise SpaceParseError("integer takes: <lo> <hi>", lineno, kind_col)
                lo = _parse_float(args[0][0], lineno, args[0][1], "lower bound")
                hi = _parse_float(args[1][0], lineno, args[1][1], "upper bound")
                if lo != int(lo) or hi != int(hi):
                    raise SpaceParseError("integer bounds must be whole numbers", lineno, args[0][1])
                params.append(ParameterSpec.integer(name, int(lo), int(hi)))
            else:
                raise SpaceParseError(
                    f"unknown parameter kind {kind!r} "
                    f"(expected {CATEGORICAL}, {CONTINUOUS}, or {INTEGER})",
                    lineno,
                    kind_col,
                )
        except ValueError as exc:
            if isinstance(exc, SpaceParseError):
                raise
            raise SpaceParseError(str(exc), lineno, kind_col) from None
        seen[name] = lineno
    if not params:
        raise SpaceParseError("space defines no parameters", 1, 1)
    return ConfigurationSpace(tuple(params))


def parse_space_file(path) -> ConfigurationSpace:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_space(fh.read())


def _format_bound(x: float) -> str:
    return format(x, ".17g")


def format_space(space: ConfigurationSpace) -> str:
    """Render a space in the same format :func:`parse_space` reads."""
    lines = []
    for p in space:
        if p.kind == CATEGORICAL:
            lines.append(f"{p.name} {CATEGORICAL} " + " ".join(p.values))
        elif p.kind == CONTINUOUS:
            lines.append(
                f"{p.name} {CONTINUOUS} {_format_bound(p.lo)} {_format_bound(p.hi)} {p.scale}"
            )
        else:
            lines.append(f"{p.name} {INTEGER} {int(p.lo)} {int(p.hi)}")
    return "\n".join(lines) + "\n"


def load_builtin_space(name: str) -> ConfigurationSpace:
    """Load one of the bundled space fixtures (see BUILTIN_SPACES)."""
    if name not in BUILTIN_SPACES:
        raise ValueError(f"unknown builtin space {name!r}; available: {', '.join(BUILTIN_SPACES)}")
    text = resources.files("paretogap.spaces").joinpath(f"{name}.space").read_text("utf-8")
    return parse_space(text)
