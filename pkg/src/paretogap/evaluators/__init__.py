"""Evaluators producing (validation, test) cost pairs for the search loop.

An evaluator is a callable ``(assignment, seed) -> (validation_costs,
test_costs)`` with an ``objectives`` attribute describing the canonical
minimization scale of its outputs.
"""

from .dataset import (
    DataSplit,
    TabularDataset,
    make_credit_like_dataset,
    read_dataset,
    read_schema,
    split_dataset,
    write_dataset,
)
from .linear import (
    LINEAR_OBJECTIVES,
    LinearModelEvaluator,
    LinearSGDClassifier,
    evaluate_linear_model,
    precision_recall,
)
from .synthetic import (
    SURFACES,
    SyntheticEvaluator,
    SyntheticProblem,
    embed_assignment,
    evaluate_synthetic,
)

__all__ = [
    "DataSplit",
    "TabularDataset",
    "make_credit_like_dataset",
    "read_dataset",
    "read_schema",
    "split_dataset",
    "write_dataset",
    "LINEAR_OBJECTIVES",
    "LinearModelEvaluator",
    "LinearSGDClassifier",
    "evaluate_linear_model",
    "precision_recall",
    "SURFACES",
    "SyntheticEvaluator",
    "SyntheticProblem",
    "embed_assignment",
    "evaluate_synthetic",
]
