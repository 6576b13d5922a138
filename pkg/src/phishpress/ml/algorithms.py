"""Five classical binary classifiers built on numpy.

Every estimator exposes fit(X, y), predict_scores(X) returning P(y=1), and a
JSON-serializable get_state()/from_state() pair. Labels are {0, 1} with 1 =
phishing. The shared decision rule is label = 1 iff score >= 0.5.

Determinism matters more than speed here: split searches iterate features in
ascending index order and accept only strictly better candidates, gradient
descent uses a fixed step, and all randomness flows from explicit seeds.
"""

from __future__ import annotations

import numpy as np


# --- logistic regression -------------------------------------------------------

def log_loss(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float) -> float:
    """Mean cross-entropy plus (l2 / 2n) * ||w||^2, computed stably via
    log(1 + exp(-margin))."""
    z = X @ w + b
    margins = np.where(y == 1, z, -z)
    n = len(y)
    return float(np.logaddexp(0.0, -margins).mean() + 0.5 * l2 * float(w @ w) / n)


def log_loss_gradient(
    w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float
) -> tuple[np.ndarray, float]:
    """Analytic gradient of ``log_loss`` in (w, b)."""
    z = X @ w + b
    p = _sigmoid(z)
    n = len(y)
    residual = p - y
    grad_w = X.T @ residual / n + l2 * w / n
    grad_b = float(residual.mean())
    return grad_w, grad_b


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class LogisticRegression:
    """Batch gradient descent on the regularized log-loss.

    Features are min-max scaled internally (fitted on training data only);
    a fixed step size, a 10,000-iteration cap, and a gradient-norm stop of
    1e-6 keep training deterministic.
    """

    def __init__(self, l2: float = 1.0, learning_rate: float = 1.0,
                 max_iter: int = 10000, tol: float = 1e-6):
        self.l2 = l2
        self.learning_rate = learning_rate
        self.max_iter = max_iter
        self.tol = tol
        self.weights: np.ndarray | None = None
        self.bias = 0.0
        self._min: np.ndarray | None = None
        self._scale: np.ndarray | None = None

    def _transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self._min) * self._scale

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LogisticRegression":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        self._min = X.min(axis=0)
        span = X.max(axis=0) - self._min
        # constant features map to 0 regardless of input
        self._scale = np.divide(1.0, span, out=np.zeros_like(span), where=span > 0)
        Xs = self._transform(X)
        w = np.zeros(X.shape[1])
        b = 0.0
        for _ in range(self.max_iter):
            gw, gb = log_loss_gradient(w, b, Xs, y, self.l2)
            norm = float(np.sqrt(gw @ gw + gb * gb))
            if norm < self.tol:
                break
            w -= self.learning_rate * gw
            b -= self.learning_rate * gb
        self.weights = w
        self.bias = b
        return self

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self._transform(np.asarray(X, dtype=float)) @ self.weights + self.bias)

    def get_state(self) -> dict:
        return {
            "l2": self.l2,
            "learning_rate": self.learning_rate,
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "feature_min": self._min.tolist(),
            "feature_scale": self._scale.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "LogisticRegression":
        model = cls(l2=state["l2"], learning_rate=state["learning_rate"])
        model.weights = np.asarray(state["weights"], dtype=float)
        model.bias = float(state["bias"])
        model._min = np.asarray(state["feature_min"], dtype=float)
        model._scale = np.asarray(state["feature_scale"], dtype=float)
        return model


# --- k-nearest neighbours --------------------------------------------------------

class KNearestNeighbors:
    """Euclidean k-NN; distance ties break by training index (stable sort)."""

    def __init__(self, k: int = 5):
        self.k = k
        self._X: np.ndarray | None = None
        self._y: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KNearestNeighbors":
        self._X = np.asarray(X, dtype=float)
        self._y = np.asarray(y, dtype=int)
        return self

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        k = min(self.k, len(self._y))
        scores = np.empty(len(X))
        for i, x in enumerate(X):
            dist = np.sqrt(((self._X - x) ** 2).sum(axis=1))
            nearest = np.argsort(dist, kind="stable")[:k]
            scores[i] = self._y[nearest].mean()
        return scores

    def get_state(self) -> dict:
        return {"k": self.k, "train_X": self._X.tolist(), "train_y": self._y.tolist()}

    @classmethod
    def from_state(cls, state: dict) -> "KNearestNeighbors":
        model = cls(k=state["k"])
        model._X = np.asarray(state["train_X"], dtype=float)
        model._y = np.asarray(state["train_y"], dtype=int)
        return model


# --- Gaussian naive Bayes ---------------------------------------------------------

class GaussianNaiveBayes:
    """Per-feature Gaussians with shared variance smoothing."""

    VAR_SMOOTHING = 1e-9

    def __init__(self):
        self.means: np.ndarray | None = None  # (2, d)
        self.variances: np.ndarray | None = None
        self.log_priors: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GaussianNaiveBayes":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        smoothing = self.VAR_SMOOTHING * max(float(X.var(axis=0).max()), 1.0)
        means, variances, priors = [], [], []
        for cls in (0, 1):
            Xc = X[y == cls]
            means.append(Xc.mean(axis=0))
            variances.append(Xc.var(axis=0) + smoothing)
            priors.append(len(Xc) / len(y))
        self.means = np.asarray(means)
        self.variances = np.asarray(variances)
        self.log_priors = np.log(np.asarray(priors))
        return self

    def _joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        jll = np.empty((len(X), 2))
        for cls in (0, 1):
            diff = X - self.means[cls]
            jll[:, cls] = self.log_priors[cls] - 0.5 * (
                np.log(2.0 * np.pi * self.variances[cls]).sum()
                + (diff**2 / self.variances[cls]).sum(axis=1)
            )
        return jll

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        jll = self._joint_log_likelihood(np.atleast_2d(np.asarray(X, dtype=float)))
        # P(1|x) = 1 / (1 + exp(jll0 - jll1)), stably
        return _sigmoid(jll[:, 1] - jll[:, 0])

    def get_state(self) -> dict:
        return {
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "log_priors": self.log_priors.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "GaussianNaiveBayes":
        model = cls()
        model.means = np.asarray(state["means"], dtype=float)
        model.variances = np.asarray(state["variances"], dtype=float)
        model.log_priors = np.asarray(state["log_priors"], dtype=float)
        return model


# --- decision tree -----------------------------------------------------------------

class _Node:
    __slots__ = ("feature", "threshold", "left", "right", "prob")

    def __init__(self, prob: float, feature: int = -1, threshold: float = 0.0,
                 left: "_Node | None" = None, right: "_Node | None" = None):
        self.prob = prob  # fraction of positives at this node (leaf value)
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"prob": self.prob}
        return {
            "prob": self.prob,
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "_Node":
        node = cls(prob=d["prob"])
        if "feature" in d:
            node.feature = d["feature"]
            node.threshold = d["threshold"]
            node.left = cls.from_dict(d["left"])
            node.right = cls.from_dict(d["right"])
        return node


def _gini(y: np.ndarray) -> float:
    if len(y) == 0:
        return 0.0
    p = y.mean()
    return 2.0 * p * (1.0 - p)


class DecisionTreeClassifier:
    """CART-style greedy tree, Gini impurity, midpoint thresholds.

    An impure node splits on the best candidate even at zero impurity
    decrease (otherwise XOR-like data would never be fit), stopping only
    when pure, at depth, or with no valid split left. ``max_features``
    draws a per-node candidate subset from ``rng`` (used by the forest).
    """

    def __init__(self, max_depth: int | None = None,
                 max_features: int | None = None,
                 rng: np.random.Generator | None = None):
        self.max_depth = max_depth
        self.max_features = max_features
        self.rng = rng
        self.root: _Node | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "DecisionTreeClassifier":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.root = self._grow(X, y, depth=0)
        return self

    def _candidate_features(self, d: int) -> np.ndarray:
        if self.max_features is None or self.max_features >= d:
            return np.arange(d)
        picked = self.rng.choice(d, size=self.max_features, replace=False)
        return np.sort(picked)

    def _grow(self, X: np.ndarray, y: np.ndarray, depth: int) -> _Node:
        prob = float(y.mean())
        if prob in (0.0, 1.0):
            return _Node(prob)
        if self.max_depth is not None and depth >= self.max_depth:
            return _Node(prob)

        best_feature, best_threshold, best_score = -1, 0.0, np.inf
        for f in self._candidate_features(X.shape[1]):
            values = np.unique(X[:, f])
            if len(values) < 2:
                continue
            for lo, hi in zip(values[:-1], values[1:]):
                threshold = (lo + hi) / 2.0
                mask = X[:, f] <= threshold
                n_left = int(mask.sum())
                score = (
                    n_left * _gini(y[mask]) + (len(y) - n_left) * _gini(y[~mask])
                ) / len(y)
                if score < best_score:
                    best_feature, best_threshold, best_score = int(f), threshold, score
        if best_feature < 0:
            return _Node(prob)  # all candidate features constant
        mask = X[:, best_feature] <= best_threshold
        return _Node(
            prob,
            feature=best_feature,
            threshold=best_threshold,
            left=self._grow(X[mask], y[mask], depth + 1),
            right=self._grow(X[~mask], y[~mask], depth + 1),
        )

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        scores = np.empty(len(X))
        for i, x in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if x[node.feature] <= node.threshold else node.right
            scores[i] = node.prob
        return scores

    def get_state(self) -> dict:
        return {"max_depth": self.max_depth, "tree": self.root.to_dict()}

    @classmethod
    def from_state(cls, state: dict) -> "DecisionTreeClassifier":
        model = cls(max_depth=state["max_depth"])
        model.root = _Node.from_dict(state["tree"])
        return model


# --- random forest -------------------------------------------------------------------

class RandomForestClassifier:
    """Bagged trees with per-node feature subsampling.

    With one tree, bootstrap off, and all features, the forest degenerates
    to the plain decision tree bit-for-bit; scores are the mean of the
    trees' leaf probabilities.
    """

    def __init__(self, n_trees: int = 100, max_depth: int | None = None,
                 max_features: str | int | None = "sqrt",
                 bootstrap: bool = True, seed: int = 42):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed
        self.trees: list[DecisionTreeClassifier] = []

    def _resolve_features(self, d: int) -> int | None:
        if self.max_features is None:
            return None
        if self.max_features == "sqrt":
            return max(1, int(round(np.sqrt(d))))
        return int(self.max_features)

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForestClassifier":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        n, d = X.shape
        m = self._resolve_features(d)
        self.trees = []
        for child_seq in np.random.SeedSequence(self.seed).spawn(self.n_trees):
            rng = np.random.default_rng(child_seq)
            idx = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = DecisionTreeClassifier(
                max_depth=self.max_depth,
                max_features=None if (m is None or m >= d) else m,
                rng=rng,
            )
            tree.fit(X[idx], y[idx])
            self.trees.append(tree)
        return self

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        all_scores = np.stack([t.predict_scores(X) for t in self.trees])
        return all_scores.mean(axis=0)

    def get_state(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "max_features": self.max_features,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
            "trees": [t.get_state() for t in self.trees],
        }

    @classmethod
    def from_state(cls, state: dict) -> "RandomForestClassifier":
        model = cls(
            n_trees=state["n_trees"],
            max_depth=state["max_depth"],
            max_features=state["max_features"],
            bootstrap=state["bootstrap"],
            seed=state["seed"],
        )
        model.trees = [DecisionTreeClassifier.from_state(s) for s in state["trees"]]
        return model
