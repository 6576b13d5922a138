"""Classical classifiers over compression-ratio and HTML features."""

from .algorithms import (
    DecisionTreeClassifier,
    GaussianNaiveBayes,
    KNearestNeighbors,
    LogisticRegression,
    RandomForestClassifier,
    log_loss,
    log_loss_gradient,
)
from .features import (
    CANONICAL_FEATURES,
    COMPRESSION_FEATURES,
    HTML_FEATURES,
    FeatureVector,
    load_feature_vectors,
    resolve_mask,
    save_feature_rows,
)
from .training import (
    DEFAULT_GRIDS,
    Algorithm,
    GridSearchReport,
    TrainedModel,
    build_estimator,
    kfold_split,
    load_model,
    predict,
    save_model,
    train,
    with_feature_mask,
)

__all__ = [
    "Algorithm",
    "CANONICAL_FEATURES",
    "COMPRESSION_FEATURES",
    "DEFAULT_GRIDS",
    "DecisionTreeClassifier",
    "FeatureVector",
    "GaussianNaiveBayes",
    "GridSearchReport",
    "HTML_FEATURES",
    "KNearestNeighbors",
    "LogisticRegression",
    "RandomForestClassifier",
    "TrainedModel",
    "build_estimator",
    "kfold_split",
    "load_feature_vectors",
    "load_model",
    "log_loss",
    "log_loss_gradient",
    "predict",
    "resolve_mask",
    "save_feature_rows",
    "save_model",
    "train",
    "with_feature_mask",
]
