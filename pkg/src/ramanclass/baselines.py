"""Classical binary classifiers and their hyper-parameter grids.

All models take a float matrix X of shape (n, width) and integer targets
y in {0, 1} (1 = positive). Trained models are immutable in practice and
safe to share; prediction never mutates state.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import StateError


class Metric(enum.Enum):
    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"


def euclidean(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(np.sum((np.asarray(a, float) - np.asarray(b, float)) ** 2)))


def manhattan(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sum(np.abs(np.asarray(a, float) - np.asarray(b, float))))


def _distances(metric: Metric, X_train: np.ndarray, X: np.ndarray) -> np.ndarray:
    """(n_query, n_train) distance matrix."""
    diff = X[:, None, :] - X_train[None, :, :]
    if metric is Metric.MANHATTAN:
        return np.abs(diff).sum(axis=2)
    return np.sqrt((diff**2).sum(axis=2))


class KnnClassifier:
    """Majority vote over the k nearest stored training spectra.

    Vote ties are broken by the label of the single nearest neighbour.
    """

    def __init__(self, k: int = 1, metric: Metric = Metric.EUCLIDEAN):
        if k < 1:
            raise ValueError("k must be positive")
        self.k = k
        self.metric = metric
        self._X = None
        self._y = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KnnClassifier":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y).astype(int)
        if len(X) == 0:
            raise ValueError("training set is empty")
        if self.k > len(X):
            raise ValueError(f"k={self.k} exceeds training size {len(X)}")
        self._X = X
        self._y = y
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self._X is None:
            raise StateError("KnnClassifier used before fit")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        dists = _distances(self.metric, self._X, X)
        out = np.empty(len(X), dtype=int)
        for i in range(len(X)):
            order = np.argsort(dists[i], kind="stable")
            nearest = self._y[order[: self.k]]
            pos = int(nearest.sum())
            neg = self.k - pos
            if pos > neg:
                out[i] = 1
            elif neg > pos:
                out[i] = 0
            else:
                out[i] = int(self._y[order[0]])
        return out

    def predict_one(self, x: np.ndarray) -> int:
        return int(self.predict(np.asarray(x)[None, :])[0])


class LinearSvm:
    """Maximum-margin linear classifier trained in the primal.

    Minimizes 0.5 ||w||^2 + C * mean(hinge) by deterministic full-batch
    subgradient descent with a diminishing step size. The per-sample
    normalization makes the decision function invariant to duplicating
    the training set. Prediction is sign(w.x + b), ties to positive.
    """

    def __init__(self, C: float = 10.0, iterations: int = 2000, step_scale: float = 1.0, seed: int = 0):
        if C <= 0:
            raise ValueError("C must be positive")
        self.C = float(C)
        self.iterations = int(iterations)
        self.step_scale = float(step_scale)
        self.seed = int(seed)
        self.w = None
        self.b = 0.0

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LinearSvm":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y).astype(int)
        classes = np.unique(y)
        if len(classes) < 2:
            raise ValueError("linear SVM training needs both classes")
        t = np.where(y == 1, 1.0, -1.0)
        n = len(X)
        w = np.zeros(X.shape[1])
        b = 0.0
        for step in range(1, self.iterations + 1):
            margins = t * (X @ w + b)
            violating = margins < 1.0
            grad_w = w - (self.C / n) * (t[violating] @ X[violating])
            grad_b = -(self.C / n) * float(t[violating].sum())
            eta = self.step_scale / np.sqrt(step)
            w = w - eta * grad_w
            b = b - eta * grad_b
        self.w = w
        self.b = b
        return self

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        if self.w is None:
            raise StateError("LinearSvm used before fit")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return X @ self.w + self.b

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision_function(X) >= 0.0).astype(int)

    def predict_one(self, x: np.ndarray) -> int:
        return int(self.predict(np.asarray(x)[None, :])[0])


class Criterion(enum.Enum):
    GINI = "gini"
    INFO_GAIN = "info_gain"


def _impurity(criterion: Criterion, pos: np.ndarray, total: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(total > 0, pos / total, 0.0)
    if criterion is Criterion.GINI:
        return 2.0 * p * (1.0 - p)
    q = 1.0 - p
    ent = np.zeros_like(p)
    mask = (p > 0) & (p < 1)
    ent[mask] = -(p[mask] * np.log2(p[mask]) + q[mask] * np.log2(q[mask]))
    return ent


class _Leaf:
    __slots__ = ("label",)

    def __init__(self, label: int):
        self.label = label


class _Split:
    __slots__ = ("feature", "threshold", "left", "right")

    def __init__(self, feature: int, threshold: float, left, right):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right


class DecisionTree:
    """Greedy binary tree of (feature <= threshold) rules.

    Candidate thresholds are midpoints between distinct consecutive
    sorted feature values; the split maximizing the impurity decrease
    wins (ties to the lowest feature index, then lowest threshold).
    Nodes stop at purity, the depth limit, or when no feature admits a
    split. Leaf labels are the node majority, ties to positive.
    """

    def __init__(self, max_depth: int = 10, criterion: Criterion = Criterion.GINI):
        if max_depth < 0:
            raise ValueError("max_depth must be non-negative")
        self.max_depth = int(max_depth)
        self.criterion = criterion
        self._root = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "DecisionTree":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y).astype(int)
        if len(X) == 0:
            raise ValueError("training set is empty")
        self._root = self._build(X, y, depth=0)
        return self

    def _majority(self, y: np.ndarray) -> int:
        pos = int(y.sum())
        return 1 if pos * 2 >= len(y) else 0

    def _build(self, X: np.ndarray, y: np.ndarray, depth: int):
        if len(np.unique(y)) == 1:
            return _Leaf(int(y[0]))
        if depth >= self.max_depth:
            return _Leaf(self._majority(y))
        split = self._best_split(X, y)
        if split is None:
            return _Leaf(self._majority(y))
        feature, threshold = split
        mask = X[:, feature] <= threshold
        left = self._build(X[mask], y[mask], depth + 1)
        right = self._build(X[~mask], y[~mask], depth + 1)
        return _Split(feature, threshold, left, right)

    def _best_split(self, X: np.ndarray, y: np.ndarray):
        n = len(y)
        parent = float(_impurity(self.criterion, np.array([y.sum()]), np.array([n]))[0])
        best = None
        best_gain = -np.inf
        for j in range(X.shape[1]):
            xs = X[:, j]
            order = np.argsort(xs, kind="stable")
            xv = xs[order]
            yv = y[order]
            boundary = np.nonzero(xv[1:] > xv[:-1])[0]
            if boundary.size == 0:
                continue
            pos_cum = np.cumsum(yv)
            n_left = boundary + 1
            n_right = n - n_left
            pos_left = pos_cum[boundary]
            pos_right = int(y.sum()) - pos_left
            child = (
                n_left * _impurity(self.criterion, pos_left, n_left)
                + n_right * _impurity(self.criterion, pos_right, n_right)
            ) / n
            gains = parent - child
            k = int(np.argmax(gains))
            if gains[k] > best_gain + 1e-15:
                best_gain = float(gains[k])
                i = boundary[k]
                best = (j, float((xv[i] + xv[i + 1]) / 2.0))
        return best

    def predict_one(self, x: np.ndarray) -> int:
        if self._root is None:
            raise StateError("DecisionTree used before fit")
        node = self._root
        while isinstance(node, _Split):
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.label

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([self.predict_one(x) for x in X], dtype=int)

    def depth(self) -> int:
        def walk(node):
            if isinstance(node, _Leaf):
                return 0
            return 1 + max(walk(node.left), walk(node.right))

        if self._root is None:
            raise StateError("DecisionTree used before fit")
        return walk(self._root)


VARIANCE_FLOOR = 1e-9


class GaussianNaiveBayes:
    """Per-class Gaussian feature densities under independence.

    All posterior arithmetic happens in log space, and a small floor is
    added to every feature variance so the constant 0/1 endpoints of
    normalized spectra never divide by zero. Posterior ties go positive.
    """

    def __init__(self):
        self.priors = None
        self.means = None
        self.variances = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GaussianNaiveBayes":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y).astype(int)
        if set(np.unique(y)) != {0, 1}:
            raise ValueError("Gaussian NB training needs both classes")
        self.priors = {}
        self.means = {}
        self.variances = {}
        for c in (0, 1):
            Xc = X[y == c]
            self.priors[c] = len(Xc) / len(X)
            self.means[c] = Xc.mean(axis=0)
            self.variances[c] = Xc.var(axis=0) + VARIANCE_FLOOR
        return self

    def _log_joint(self, X: np.ndarray, c: int) -> np.ndarray:
        mu = self.means[c]
        var = self.variances[c]
        ll = -0.5 * (np.log(2.0 * np.pi * var) + (X - mu) ** 2 / var).sum(axis=1)
        return np.log(self.priors[c]) + ll

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self.priors is None:
            raise StateError("GaussianNaiveBayes used before fit")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return (self._log_joint(X, 1) >= self._log_joint(X, 0)).astype(int)

    def predict_one(self, x: np.ndarray) -> int:
        return int(self.predict(np.asarray(x)[None, :])[0])


# --- search grids ------------------------------------------------------------

KNN_GRID = [
    {"k": k, "metric": metric.value}
    for metric in (Metric.EUCLIDEAN, Metric.MANHATTAN)
    for k in (1, 3, 5, 7, 9)
]

SVM_GRID = [{"C": c} for c in (0.01, 0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0, 30000.0)]

TREE_GRID = [{"max_depth": d} for d in range(1, 16)]

GNB_GRID = [{}]

BASELINE_GRIDS = {
    "knn": KNN_GRID,
    "svm": SVM_GRID,
    "tree": TREE_GRID,
    "gnb": GNB_GRID,
}


def make_baseline(kind: str, **params):
    """Instantiate a baseline model from its grid-cell parameters."""
    if kind == "knn":
        metric = params.get("metric", Metric.MANHATTAN)
        if isinstance(metric, str):
            metric = Metric(metric)
        return KnnClassifier(k=int(params.get("k", 1)), metric=metric)
    if kind == "svm":
        return LinearSvm(
            C=float(params.get("C", 10.0)),
            iterations=int(params.get("iterations", 2000)),
            seed=int(params.get("seed", 0)),
        )
    if kind == "tree":
        criterion = params.get("criterion", Criterion.GINI)
        if isinstance(criterion, str):
            criterion = Criterion(criterion)
        return DecisionTree(max_depth=int(params.get("max_depth", 10)), criterion=criterion)
    if kind == "gnb":
        return GaussianNaiveBayes()
    raise ValueError(f"unknown baseline kind {kind!r}")
