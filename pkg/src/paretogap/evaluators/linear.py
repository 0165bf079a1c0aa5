"""Linear classifier evaluator: SGD-trained logistic model scored by
precision and recall losses on the validation and test splits.

Everything is deterministic given (data, split, assignment, seed): feature
preprocessing is frozen on the training part, epoch shuffling derives from the
seed, and no external learning library is involved, so archives replay
bit-identically across machines and process counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..core import CostVector, ObjectiveSpec, canonicalize
from .dataset import DataSplit, TabularDataset

__all__ = [
    "LinearSGDClassifier",
    "LinearModelEvaluator",
    "evaluate_linear_model",
    "precision_recall",
    "LINEAR_OBJECTIVES",
]

# Raw metrics are maximized on [0, 1]; costs are their canonical losses.
_RAW_METRICS = (
    ObjectiveSpec("precision", "maximize", (0.0, 1.0)),
    ObjectiveSpec("recall", "maximize", (0.0, 1.0)),
)
LINEAR_OBJECTIVES = (
    ObjectiveSpec("precision_loss", "minimize", (0.0, 1.0)),
    ObjectiveSpec("recall_loss", "minimize", (0.0, 1.0)),
)

PENALTIES = ("l2", "l1", "elasticnet")

_EPOCHS = 100
_BATCH = 32
_PLATEAU_TOL = 1e-4
_PLATEAU_PATIENCE = 5
_ETA_DIVISOR = 5.0


def precision_recall(
    predictions: Sequence[int], labels: Sequence[int]
) -> tuple[float, float]:
    """Precision and recall for 0/1 predictions, with 0 on empty denominators.

    The zero convention (no positive predictions -> precision 0, no positive
    labels -> recall 0) treats a degenerate classifier as worst-case rather
    than undefined; it visibly reshapes fronts, so it is pinned here.
    """
    pred = np.asarray(predictions)
    lab = np.asarray(labels)
    if pred.shape != lab.shape or pred.ndim != 1 or pred.shape[0] < 1:
        raise ValueError("predictions and labels must be equal-length nonempty vectors")
    for name, arr in (("predictions", pred), ("labels", lab)):
        if not np.isin(arr, (0, 1)).all():
            raise ValueError(f"{name} must contain only 0 and 1")
    tp = int(((pred == 1) & (lab == 1)).sum())
    fp = int(((pred == 1) & (lab == 0)).sum())
    fn = int(((pred == 0) & (lab == 1)).sum())
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    return precision, recall


# Rational approximation of the standard normal inverse CDF (Acklam's
# coefficients; relative error below 1.2e-9 across (0, 1)).
_PPF_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
          1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_PPF_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
          6.680131188771972e+01, -1.328068155288572e+01)
_PPF_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
          -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_PPF_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
          3.754408661907416e+00)
_PPF_LOW = 0.02425


def _norm_ppf(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if ((p <= 0.0) | (p >= 1.0)).any():
        raise ValueError("probabilities must lie strictly inside (0, 1)")
    a, b, c, d = _PPF_A, _PPF_B, _PPF_C, _PPF_D
    out = np.empty_like(p)

    lower = p < _PPF_LOW
    upper = p > 1.0 - _PPF_LOW
    central = ~(lower | upper)

    q = p[central] - 0.5
    r = q * q
    num = ((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]
    den = ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
    out[central] = num * q / den

    for mask, prob, sign in ((lower, p[lower], 1.0), (upper, 1.0 - p[upper], -1.0)):
        q = np.sqrt(-2.0 * np.log(prob))
        num = ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
        den = (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        out[mask] = sign * num / den
    return out


class _Preprocessor:
    """Train-frozen feature map: rank-to-normal numerics, one-hot categoricals.

    Fitting only on the training rows keeps validation/test information out of
    the feature scaling. Categorical levels unseen in training encode as
    all-zeros.
    """

    def __init__(self, data: TabularDataset, train_idx: np.ndarray):
        self._data = data
        self._numeric = [
            (name, np.sort(data.features[name][train_idx].astype(float)))
            for name in data.numeric_names
        ]
        self._categorical = [
            (name, tuple(sorted(set(data.features[name][train_idx]))))
            for name in data.categorical_names
        ]
        self.width = len(self._numeric) + sum(len(lv) for _, lv in self._categorical)

    def transform(self, idx: np.ndarray) -> np.ndarray:
        cols = []
        for name, ref in self._numeric:
            v = self._data.features[name][idx].astype(float)
            n = ref.shape[0]
            rank = (np.searchsorted(ref, v, side="left")
                    + np.searchsorted(ref, v, side="right")) / 2.0
            p = np.clip(rank / n, 0.5 / n, 1.0 - 0.5 / n)
            cols.append(_norm_ppf(p))
        for name, levels in self._categorical:
            v = self._data.features[name][idx]
            for level in levels:
                cols.append((v == level).astype(float))
        return np.column_stack(cols)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log_loss(z: np.ndarray, y: np.ndarray, sw: np.ndarray) -> float:
    # softplus(z) - y*z, numerically stable for large |z|
    per_sample = np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z))) - y * z
    return float((sw * per_sample).sum() / sw.sum())


@dataclass
class LinearSGDClassifier:
    """Logistic model trained with minibatch SGD on class-weighted log loss.

    The step size starts at ``eta0`` and divides by 5 whenever the full-data
    training loss fails to improve by 1e-4 for 5 consecutive epochs; the
    epoch budget is fixed at 100 regardless. Shuffling comes from ``seed``.
    """

    penalty: str = "l2"
    alpha: float = 1e-4
    l1_ratio: float = 0.15
    fit_intercept: bool = True
    eta0: float = 0.01
    pos_weight: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.penalty not in PENALTIES:
            raise ValueError(f"penalty must be one of {PENALTIES}, got {self.penalty!r}")
        if self.alpha < 0 or self.eta0 <= 0 or self.pos_weight <= 0:
            raise ValueError("alpha must be >= 0, eta0 and pos_weight > 0")
        if not 0.0 <= self.l1_ratio <= 1.0:
            raise ValueError("l1_ratio must lie in [0, 1]")
        self.coef_: np.ndarray | None = None
        self.intercept_: float = 0.0

    def _penalty_grad(self, w: np.ndarray) -> np.ndarray:
        if self.penalty == "l2":
            return self.alpha * w
        if self.penalty == "l1":
            return self.alpha * np.sign(w)
        return self.alpha * (
            self.l1_ratio * np.sign(w) + (1.0 - self.l1_ratio) * w
        )

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LinearSGDClassifier":
        n, d = X.shape
        if n < 1:
            raise ValueError("cannot fit on an empty training set")
        w = np.zeros(d)
        b = 0.0
        sw = np.where(y == 1, self.pos_weight, 1.0)
        rng = np.random.default_rng(self.seed)
        eta = self.eta0
        best = math.inf
        stall = 0
        for _ in range(_EPOCHS):
            perm = rng.permutation(n)
            for start in range(0, n, _BATCH):
                idx = perm[start : start + _BATCH]
                Xb, yb, swb = X[idx], y[idx], sw[idx]
                gz = swb * (_sigmoid(Xb @ w + b) - yb) / swb.sum()
                w -= eta * (Xb.T @ gz + self._penalty_grad(w))
                if self.fit_intercept:
                    b -= eta * float(gz.sum())
            loss = _log_loss(X @ w + b, y, sw)
            if loss < best - _PLATEAU_TOL:
                stall = 0
            else:
                stall += 1
                if stall >= _PLATEAU_PATIENCE:
                    eta /= _ETA_DIVISOR
                    stall = 0
            best = min(best, loss)
        self.coef_ = w
        self.intercept_ = b
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        if self.coef_ is None:
            raise ValueError("classifier is not fitted")
        return _sigmoid(X @ self.coef_ + self.intercept_)

    def predict(self, X: np.ndarray) -> np.ndarray:
        # positive iff the logistic output clears 0.5
        return (self.predict_proba(X) > 0.5).astype(np.int64)


def _parse_assignment(assignment: Mapping[str, object]) -> dict[str, object]:
    required = ("penalty", "alpha", "l1_ratio", "fit_intercept", "eta0", "pos_class_weight_exp")
    missing = [k for k in required if k not in assignment]
    if missing:
        raise ValueError(f"assignment missing parameters: {', '.join(missing)}")
    penalty = str(assignment["penalty"])
    if penalty not in PENALTIES:
        raise ValueError(f"penalty must be one of {PENALTIES}, got {penalty!r}")
    raw_intercept = assignment["fit_intercept"]
    if isinstance(raw_intercept, bool):
        fit_intercept = raw_intercept
    elif str(raw_intercept).lower() in ("true", "false"):
        fit_intercept = str(raw_intercept).lower() == "true"
    else:
        raise ValueError(f"fit_intercept must be true or false, got {raw_intercept!r}")
    return {
        "penalty": penalty,
        "alpha": float(assignment["alpha"]),
        "l1_ratio": float(assignment["l1_ratio"]),
        "fit_intercept": fit_intercept,
        "eta0": float(assignment["eta0"]),
        "pos_weight": 2.0 ** float(assignment["pos_class_weight_exp"]),
    }


def _train_seed(seed: int) -> int:
    # sub-stream 1 of the record seed; 0 is reserved for configuration sampling
    ss = np.random.SeedSequence(entropy=(seed, 1))
    return int(ss.generate_state(1, np.uint64)[0])


class LinearModelEvaluator:
    """Caches the split design matrices so repeated evaluations stay cheap."""

    def __init__(self, data: TabularDataset, split: DataSplit):
        for part_name, idx in (
            ("train", split.train),
            ("validation", split.validation),
            ("test", split.test),
        ):
            if idx.shape[0] == 0:
                raise ValueError(f"{part_name} split part is empty")
        if not np.isin(data.labels, (0, 1)).all():
            raise ValueError("labels must be binary 0/1")
        pre = _Preprocessor(data, split.train)
        self._X = {
            "train": pre.transform(split.train),
            "validation": pre.transform(split.validation),
            "test": pre.transform(split.test),
        }
        self._y = {
            "train": data.labels[split.train].astype(np.int64),
            "validation": data.labels[split.validation].astype(np.int64),
            "test": data.labels[split.test].astype(np.int64),
        }

    @property
    def objectives(self) -> tuple[ObjectiveSpec, ...]:
        return LINEAR_OBJECTIVES

    def __call__(
        self, assignment: Mapping[str, object], seed: int
    ) -> tuple[CostVector, CostVector]:
        params = _parse_assignment(assignment)
        model = LinearSGDClassifier(seed=_train_seed(seed), **params)
        model.fit(self._X["train"], self._y["train"])
        costs = []
        for part in ("validation", "test"):
            pred = model.predict(self._X[part])
            costs.append(canonicalize(precision_recall(pred, self._y[part]), _RAW_METRICS))
        return costs[0], costs[1]


def evaluate_linear_model(
    data: TabularDataset,
    split: DataSplit,
    assignment: Mapping[str, object],
    seed: int,
) -> tuple[CostVector, CostVector]:
    """One-shot evaluation of a linear-model configuration.

    Returns canonical (1 - precision, 1 - recall) cost vectors on the
    validation and test parts. Prefer :class:`LinearModelEvaluator` when
    evaluating many configurations on the same data and split.
    """
    return LinearModelEvaluator(data, split)(assignment, seed)
