"""Model selection: stratified k-fold CV, grid search, and persistence."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from ..errors import ArityMismatch, DegenerateData, InsufficientData
from .algorithms import (
    DecisionTreeClassifier,
    GaussianNaiveBayes,
    KNearestNeighbors,
    LogisticRegression,
    RandomForestClassifier,
)
from .features import FeatureVector


class Algorithm(enum.Enum):
    LOGISTIC_REGRESSION = "logistic"
    K_NEAREST_NEIGHBORS = "knn"
    GAUSSIAN_NAIVE_BAYES = "naive-bayes"
    DECISION_TREE = "tree"
    RANDOM_FOREST = "forest"

    @classmethod
    def from_string(cls, value: str) -> "Algorithm":
        return cls(value.strip().lower())


DEFAULT_GRIDS: dict[Algorithm, list[dict]] = {
    Algorithm.LOGISTIC_REGRESSION: [{"l2": v} for v in (0.01, 0.1, 1.0, 10.0)],
    Algorithm.K_NEAREST_NEIGHBORS: [{"k": v} for v in (1, 3, 5, 7)],
    Algorithm.GAUSSIAN_NAIVE_BAYES: [{}],
    Algorithm.DECISION_TREE: [{"max_depth": v} for v in (3, 5, 10, None)],
    Algorithm.RANDOM_FOREST: [
        {"n_trees": t, "max_depth": d} for t in (50, 100) for d in (5, 10, None)
    ],
}

_ESTIMATORS = {
    Algorithm.LOGISTIC_REGRESSION: LogisticRegression,
    Algorithm.K_NEAREST_NEIGHBORS: KNearestNeighbors,
    Algorithm.GAUSSIAN_NAIVE_BAYES: GaussianNaiveBayes,
    Algorithm.DECISION_TREE: DecisionTreeClassifier,
    Algorithm.RANDOM_FOREST: RandomForestClassifier,
}


def build_estimator(algorithm: Algorithm, params: dict, seed: int):
    if algorithm is Algorithm.RANDOM_FOREST:
        return RandomForestClassifier(seed=seed, **params)
    return _ESTIMATORS[algorithm](**params)


@dataclass(frozen=True)
class TrainedModel:
    algorithm: Algorithm
    estimator: Any
    hyperparams: dict
    feature_mask: tuple[str, ...]
    seed: int


@dataclass(frozen=True)
class GridSearchReport:
    candidates: tuple[tuple[dict, float], ...]  # (params, mean CV accuracy)
    best_params: dict
    best_accuracy: float
    seed: int


def kfold_split(n: int, k: int, labels: Sequence[int], seed: int) -> np.ndarray:
    """Stratified fold ids: per class, fold sizes differ by at most one;
    deterministic for a given seed; folds partition range(n)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < k:
        raise InsufficientData(f"{n} samples cannot fill {k} folds")
    labels = np.asarray(labels, dtype=int)
    if len(labels) != n:
        raise ValueError("labels length must equal n")
    rng = np.random.default_rng(seed)
    folds = np.empty(n, dtype=int)
    cursor = 0  # runs across classes so overall sizes stay near-equal too
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        for i in rng.permutation(idx):
            folds[i] = cursor % k
            cursor += 1
    return folds


def _accuracy(estimator, X: np.ndarray, y: np.ndarray) -> float:
    predicted = (estimator.predict_scores(X) >= 0.5).astype(int)
    return float((predicted == y).mean())


def train(
    dataset: Sequence[FeatureVector],
    algorithm: Algorithm,
    grid: Sequence[dict] | None = None,
    seed: int = 42,
    folds: int = 3,
) -> tuple[TrainedModel, GridSearchReport]:
    """Grid search with stratified k-fold CV, then refit the best candidate
    on the full training data. Ties in mean CV accuracy break by grid order."""
    unlabeled = [v.doc_id for v in dataset if v.label is None]
    if unlabeled:
        raise ValueError(f"training vectors without labels: {unlabeled[:3]}")
    X = np.asarray([v.features for v in dataset], dtype=float)
    y = np.asarray([v.label for v in dataset], dtype=int)
    classes, counts = np.unique(y, return_counts=True)
    if len(classes) < 2:
        raise DegenerateData("training data contains a single class")
    if counts.min() < 3:
        raise InsufficientData("need at least 3 samples per class")

    grid = list(grid) if grid is not None else DEFAULT_GRIDS[algorithm]
    assignments = kfold_split(len(y), folds, y, seed)
    scored: list[tuple[dict, float]] = []
    best: tuple[dict, float] | None = None
    for params in grid:
        fold_scores = []
        for f in range(folds):
            mask = assignments == f
            estimator = build_estimator(algorithm, params, seed)
            estimator.fit(X[~mask], y[~mask])
            fold_scores.append(_accuracy(estimator, X[mask], y[mask]))
        mean_acc = math.fsum(fold_scores) / folds
        scored.append((params, mean_acc))
        if best is None or mean_acc > best[1]:
            best = (params, mean_acc)

    final = build_estimator(algorithm, best[0], seed)
    final.fit(X, y)
    mask_names = tuple(f"f{i}" for i in range(X.shape[1]))
    model = TrainedModel(
        algorithm=algorithm,
        estimator=final,
        hyperparams=dict(best[0]),
        feature_mask=mask_names,
        seed=seed,
    )
    report = GridSearchReport(
        candidates=tuple((dict(p), a) for p, a in scored),
        best_params=dict(best[0]),
        best_accuracy=best[1],
        seed=seed,
    )
    return model, report


def with_feature_mask(model: TrainedModel, mask: Sequence[str]) -> TrainedModel:
    """Attach the real feature names used to build the training matrix."""
    if len(mask) != len(model.feature_mask):
        raise ArityMismatch(
            f"mask arity {len(mask)} != trained arity {len(model.feature_mask)}"
        )
    return TrainedModel(
        algorithm=model.algorithm,
        estimator=model.estimator,
        hyperparams=model.hyperparams,
        feature_mask=tuple(mask),
        seed=model.seed,
    )


def predict(model: TrainedModel, vector: FeatureVector) -> tuple[int, float]:
    """(label, score) with label = 1 iff score >= 0.5."""
    if len(vector.features) != len(model.feature_mask):
        raise ArityMismatch(
            f"vector arity {len(vector.features)} != model arity {len(model.feature_mask)}"
        )
    score = float(model.estimator.predict_scores(np.asarray([vector.features]))[0])
    return int(score >= 0.5), score


def save_model(model: TrainedModel, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "algorithm": model.algorithm.value,
        "hyperparams": model.hyperparams,
        "feature_mask": list(model.feature_mask),
        "seed": model.seed,
        "parameters": model.estimator.get_state(),
    }
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path


def load_model(path: str | Path) -> TrainedModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    algorithm = Algorithm.from_string(doc["algorithm"])
    estimator = _ESTIMATORS[algorithm].from_state(doc["parameters"])
    return TrainedModel(
        algorithm=algorithm,
        estimator=estimator,
        hyperparams=doc["hyperparams"],
        feature_mask=tuple(doc["feature_mask"]),
        seed=int(doc["seed"]),
    )
