"""Tabular binary-classification data: ingestion, validation, and splitting.

Datasets arrive as a comma-separated file with a header row plus a sidecar
schema file declaring each column ``numeric``, ``categorical``, or ``label``
(exactly one label). Ingestion rejects missing values and non-binary labels
up front so evaluators can assume clean data.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "TabularDataset",
    "DataSplit",
    "read_schema",
    "read_dataset",
    "write_dataset",
    "split_dataset",
    "make_credit_like_dataset",
]

NUMERIC = "numeric"
CATEGORICAL = "categorical"
LABEL = "label"


@dataclass(frozen=True)
class TabularDataset:
    """Immutable column-major table with a binary label column."""

    feature_names: tuple[str, ...]
    kinds: Mapping[str, str]  # feature name -> numeric | categorical
    features: Mapping[str, np.ndarray]
    label_name: str
    labels: np.ndarray

    def __post_init__(self) -> None:
        if not self.feature_names:
            raise ValueError("dataset needs at least one feature column")
        n = self.labels.shape[0]
        if n < 1:
            raise ValueError("dataset has no rows")
        for name in self.feature_names:
            kind = self.kinds.get(name)
            if kind not in (NUMERIC, CATEGORICAL):
                raise ValueError(f"column {name!r}: kind must be numeric or categorical")
            col = self.features[name]
            if col.shape[0] != n:
                raise ValueError(f"column {name!r}: length {col.shape[0]} != {n} rows")
            if kind == NUMERIC and not np.isfinite(col.astype(float)).all():
                raise ValueError(f"column {name!r}: non-finite or missing numeric values")
            if kind == CATEGORICAL and any(v == "" for v in col):
                raise ValueError(f"column {name!r}: empty categorical values")
        labels = np.asarray(self.labels)
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must all be 0 or 1")
        if labels.min() == labels.max():
            raise ValueError("dataset needs at least one row of each class")
        for arr in (*self.features.values(), self.labels):
            arr.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def categorical_names(self) -> tuple[str, ...]:
        return tuple(n for n in self.feature_names if self.kinds[n] == CATEGORICAL)

    @property
    def numeric_names(self) -> tuple[str, ...]:
        return tuple(n for n in self.feature_names if self.kinds[n] == NUMERIC)

    @property
    def positive_fraction(self) -> float:
        return float(self.labels.mean())

    def summary(self) -> str:
        return (
            f"{self.n_rows} rows, {self.n_features} features "
            f"({len(self.categorical_names)} categorical, {len(self.numeric_names)} numeric), "
            f"{int(self.labels.sum())} positive ({100 * self.positive_fraction:.1f}%)"
        )


def read_schema(path) -> tuple[dict[str, str], str]:
    """Parse a sidecar schema: one ``<column> <kind>`` pair per line."""
    kinds: dict[str, str] = {}
    label_name: str | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}: line {lineno}: expected '<column> <kind>'")
            name, kind = parts
            if kind not in (NUMERIC, CATEGORICAL, LABEL):
                raise ValueError(
                    f"{path}: line {lineno}: kind must be numeric, categorical, or label"
                )
            if name in kinds or name == label_name:
                raise ValueError(f"{path}: line {lineno}: duplicate column {name!r}")
            if kind == LABEL:
                if label_name is not None:
                    raise ValueError(f"{path}: line {lineno}: second label column")
                label_name = name
            else:
                kinds[name] = kind
    if label_name is None:
        raise ValueError(f"{path}: schema declares no label column")
    if not kinds:
        raise ValueError(f"{path}: schema declares no feature columns")
    return kinds, label_name


def read_dataset(csv_path, schema_path) -> TabularDataset:
    """Load and validate a CSV against its schema."""
    kinds, label_name = read_schema(schema_path)
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{csv_path}: empty file") from None
        expected = set(kinds) | {label_name}
        if set(header) != expected or len(header) != len(expected):
            raise ValueError(
                f"{csv_path}: header {header} does not match schema columns {sorted(expected)}"
            )
        columns: dict[str, list] = {name: [] for name in header}
        for rowno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValueError(f"{csv_path}: row {rowno}: expected {len(header)} cells")
            for name, cell in zip(header, row):
                if cell == "":
                    raise ValueError(f"{csv_path}: row {rowno}: missing value in {name!r}")
                if name == label_name:
                    if cell not in ("0", "1"):
                        raise ValueError(
                            f"{csv_path}: row {rowno}: label must be 0 or 1, got {cell!r}"
                        )
                    columns[name].append(int(cell))
                elif kinds[name] == NUMERIC:
                    try:
                        columns[name].append(float(cell))
                    except ValueError:
                        raise ValueError(
                            f"{csv_path}: row {rowno}: non-numeric value {cell!r} in {name!r}"
                        ) from None
                else:
                    columns[name].append(cell)
    feature_names = tuple(n for n in header if n != label_name)
    features = {
        n: np.array(columns[n], dtype=float if kinds[n] == NUMERIC else object)
        for n in feature_names
    }
    return TabularDataset(
        feature_names=feature_names,
        kinds=kinds,
        features=features,
        label_name=label_name,
        labels=np.array(columns[label_name], dtype=np.int64),
    )


def write_dataset(dataset: TabularDataset, csv_path, schema_path) -> None:
    """Write a dataset back out in the ingestible CSV + schema form."""
    with open(schema_path, "w", encoding="utf-8") as fh:
        for name in dataset.feature_names:
            fh.write(f"{name} {dataset.kinds[name]}\n")
        fh.write(f"{dataset.label_name} {LABEL}\n")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([*dataset.feature_names, dataset.label_name])
        for i in range(dataset.n_rows):
            row = []
            for name in dataset.feature_names:
                value = dataset.features[name][i]
                row.append(format(value, ".17g") if dataset.kinds[name] == NUMERIC else value)
            row.append(int(dataset.labels[i]))
            writer.writerow(row)


@dataclass(frozen=True)
class DataSplit:
    """Disjoint covering train/validation/test row indices."""

    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray

    def __post_init__(self) -> None:
        parts = [self.train, self.validation, self.test]
        total = sum(p.shape[0] for p in parts)
        merged = np.concatenate(parts)
        if np.unique(merged).shape[0] != total:
            raise ValueError("split parts must be disjoint")
        for p in parts:
            p.setflags(write=False)

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (self.train.shape[0], self.validation.shape[0], self.test.shape[0])


def _largest_remainder(ideals: np.ndarray, total: int) -> np.ndarray:
    """Round nonnegative ideals (summing to ``total``) to ints preserving the sum."""
    floors = np.floor(ideals).astype(int)
    shortfall = total - int(floors.sum())
    remainders = ideals - floors
    # ties broken toward earlier parts, deterministically
    order = np.lexsort((np.arange(ideals.shape[0]), -remainders))
    floors[order[:shortfall]] += 1
    return floors


def split_dataset(
    data: TabularDataset,
    fractions: Sequence[float] = (0.6, 0.2, 0.2),
    seed: int = 0,
) -> DataSplit:
    """Seed-deterministic stratified train/validation/test split.

    Part sizes land within one row of the requested fractions, and each
    part's class balance within one row of the dataset's. Stratification is
    essential here because unbalanced data can otherwise lose nearly all
    positives from a small part.
    """
    fracs = np.asarray(fractions, dtype=float)
    if fracs.shape != (3,) or (fracs <= 0).any() or abs(fracs.sum() - 1.0) > 1e-9:
        raise ValueError(f"fractions must be three positive values summing to 1, got {fractions}")
    n = data.n_rows
    if n < 10:
        raise ValueError(f"dataset has {n} rows; need at least 10 to split")
    labels = data.labels
    class_indices = {c: np.flatnonzero(labels == c) for c in (0, 1)}
    for c, idx in class_indices.items():
        if idx.shape[0] < 3:
            raise ValueError(
                f"class {c} has {idx.shape[0]} rows, fewer than the 3 split parts"
            )

    part_sizes = _largest_remainder(fracs * n, n)
    pos_total = int(class_indices[1].shape[0])
    pos_per_part = _largest_remainder(part_sizes * (pos_total / n), pos_total)
    neg_per_part = part_sizes - pos_per_part
    counts = {1: pos_per_part, 0: neg_per_part}

    rng = np.random.default_rng(seed)
    parts: list[list[np.ndarray]] = [[], [], []]
    for c in (0, 1):
        shuffled = rng.permutation(class_indices[c])
        offset = 0
        for p in range(3):
            k = int(counts[c][p])
            parts[p].append(shuffled[offset : offset + k])
            offset += k
    train, validation, test = (np.sort(np.concatenate(chunks)) for chunks in parts)
    return DataSplit(train=train, validation=validation, test=test)


def make_credit_like_dataset(seed: int = 0) -> TabularDataset:
    """Deterministic stand-in with the shape of a small credit-scoring table.

    1000 rows, 20 features (13 categorical, 7 numeric), exactly 30% positive,
    no missing values. A latent risk score drives both the informative
    features and the label, with heavy noise so the learning problem stays
    genuinely hard at this size.
    """
    n = 1000
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, 929)))
    latent = rng.normal(size=n)

    features: dict[str, np.ndarray] = {}
    kinds: dict[str, str] = {}
    names: list[str] = []

    # informative level counts vary; weight 0 marks pure-noise columns
    cat_plan = [(3, 1.2), (4, 0.9), (2, 1.5), (5, 0.7), (3, 0.0), (4, 1.0), (2, 0.0),
                (6, 0.5), (3, 0.8), (4, 0.0), (2, 1.1), (5, 0.6), (3, 0.4)]
    for j, (levels, weight) in enumerate(cat_plan):
        name = f"cat{j:02d}"
        score = weight * latent + rng.normal(size=n)
        edges = np.quantile(score, np.linspace(0, 1, levels + 1)[1:-1])
        codes = np.searchsorted(edges, score, side="right")
        features[name] = np.array([f"L{c}" for c in codes], dtype=object)
        kinds[name] = CATEGORICAL
        names.append(name)

    num_plan = [1.0, 0.8, 0.0, 1.3, 0.0, 0.6, 0.9]
    for j, weight in enumerate(num_plan):
        name = f"num{j:02d}"
        base = weight * latent + rng.normal(size=n)
        if j % 3 == 1:  # vary the marginal shapes
            base = np.exp(base / 2.0)
        features[name] = base
        kinds[name] = NUMERIC
        names.append(name)

    score = latent + 0.8 * rng.normal(size=n)
    threshold = np.quantile(score, 0.7)
    labels = (score > threshold).astype(np.int64)
    # quantile ties could over/under-shoot the exact 30%; repair deterministically
    target = int(round(0.3 * n))
    if labels.sum() != target:
        order = np.argsort(-score, kind="stable")
        labels = np.zeros(n, dtype=np.int64)
        labels[order[:target]] = 1

    return TabularDataset(
        feature_names=tuple(names),
        kinds=kinds,
        features=features,
        label_name="target",
        labels=labels,
    )
