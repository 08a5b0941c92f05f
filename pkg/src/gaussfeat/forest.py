"""CART decision trees and a bagged random forest, built from scratch.

Split quality is Gini impurity decrease. To keep exact determinism the
scan maximizes ``S = sq_L/n_L + sq_R/n_R`` where ``sq`` is the integer
sum of squared class counts on each side; the impurity decrease equals
``(S - sq_parent/n) / n``, so maximizing S maximizes the decrease while
every candidate is scored through the same handful of exact integer
-> float conversions. Ties resolve to the lowest feature index, then
the lowest threshold. Thresholds are midpoints between consecutive
distinct sorted values, and samples route left when ``x <= threshold``.
"""

from dataclasses import dataclass
import json

import numpy as np

from ._base import BaseEstimator
from .errors import ConfigError, PersistenceError
from .validation import check_array, check_is_fitted, check_seed, check_X_y

FORMAT_VERSION = 1
_FORMAT_NAME = "gauss-forest-model"


def gini_impurity(counts):
    """1 - sum(p^2) for a vector of nonnegative class counts."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0.0:
        return 0.0
    p = counts / total
    return float(1.0 - np.dot(p, p))


def best_split(X, y, n_classes, feature_indices=None):
    """Best (feature, threshold, impurity_decrease) or None.

    ``feature_indices`` restricts the scan; candidates are visited in
    ascending feature order so exact score ties land on the lowest
    feature index, then the lowest threshold within a feature.
    """
    n = len(y)
    if n < 2:
        return None
    if feature_indices is None:
        feature_indices = np.arange(X.shape[1])
    else:
        feature_indices = np.sort(np.asarray(feature_indices, dtype=np.int64))
    total = np.bincount(y, minlength=n_classes).astype(np.int64)
    parent_term = float(np.sum(total * total)) / n
    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), y] = 1
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = np.arange(n - 1, 0, -1, dtype=np.float64)
    best = None
    for f in feature_indices:
        x = X[:, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        valid = xs[:-1] < xs[1:]
        if not valid.any():
            continue
        cum = np.cumsum(onehot[order], axis=0)
        left = cum[:-1]
        right = total[None, :] - left
        sq_left = np.sum(left * left, axis=1).astype(np.float64)
        sq_right = np.sum(right * right, axis=1).astype(np.float64)
        scores = sq_left / n_left + sq_right / n_right
        scores[~valid] = -np.inf
        i = int(np.argmax(scores))
        s = float(scores[i])
        if best is None or s > best[0]:
            threshold = 0.5 * (xs[i] + xs[i + 1])
            if threshold >= xs[i + 1]:
                # adjacent floats can round the midpoint up; pin the
                # threshold so `x <= threshold` reproduces the counts
                threshold = xs[i]
            best = (s, int(f), float(threshold))
    if best is None:
        return None
    s, f, threshold = best
    decrease = (s - parent_term) / n
    if decrease <= 0.0:
        return None
    return f, threshold, decrease


@dataclass
class Tree:
    """Flat array form of a fitted tree.

    ``feature[i] == -1`` marks a leaf. Internal nodes route a sample
    left when its value at ``feature[i]`` is <= ``threshold[i]``.
    ``counts`` holds the training class counts that reached each node;
    ``decrease`` is the local impurity decrease of each split (0 at
    leaves). Node ids are assigned in split order of a depth-first,
    left-first build, with the root at 0.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray
    decrease: np.ndarray

    @property
    def n_nodes(self):
        return len(self.feature)


def fit_tree(X, y, n_classes, max_depth=100, min_samples_split=2,
             features_per_split=None, rng=None):
    """Grow a CART tree to purity or the stated limits.

    When ``features_per_split`` is smaller than the feature count, each
    split considers a fresh without-replacement draw of that many
    features; draws happen in depth-first left-first node order so a
    seeded generator reproduces the tree exactly.
    """
    n, d = X.shape
    if features_per_split is not None and features_per_split < d and rng is None:
        raise ConfigError("feature subsampling needs an rng")
    feature = [0]
    threshold = [0.0]
    left = [-1]
    right = [-1]
    counts = [np.bincount(y, minlength=n_classes).astype(np.int64)]
    decrease = [0.0]
    stack = [(0, np.arange(n), 0)]
    while stack:
        node, rows, depth = stack.pop()
        node_counts = np.bincount(y[rows], minlength=n_classes).astype(np.int64)
        counts[node] = node_counts
        feature[node] = -1
        if (depth >= max_depth or len(rows) < min_samples_split
                or np.count_nonzero(node_counts) <= 1):
            continue
        if features_per_split is None or features_per_split >= d:
            feats = None
        else:
            feats = rng.choice(d, size=features_per_split, replace=False)
        found = best_split(X[rows], y[rows], n_classes, feats)
        if found is None:
            continue
        f, thr, dec = found
        go_left = X[rows, f] <= thr
        left_id = len(feature)
        right_id = left_id + 1
        feature[node] = f
        threshold[node] = thr
        left[node] = left_id
        right[node] = right_id
        decrease[node] = dec
        for _ in range(2):
            feature.append(0)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            counts.append(None)
            decrease.append(0.0)
        stack.append((right_id, rows[~go_left], depth + 1))
        stack.append((left_id, rows[go_left], depth + 1))
    return Tree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        counts=np.vstack(counts),
        decrease=np.asarray(decrease, dtype=np.float64),
    )


def tree_apply(tree, X):
    """Leaf node id for every row."""
    idx = np.zeros(len(X), dtype=np.int64)
    while True:
        active = np.nonzero(tree.feature[idx] >= 0)[0]
        if len(active) == 0:
            return idx
        at = idx[active]
        go_left = X[active, tree.feature[at]] <= tree.threshold[at]
        idx[active] = np.where(go_left, tree.left[at], tree.right[at])


def tree_predict_proba(tree, X):
    leaves = tree_apply(tree, X)
    counts = tree.counts[leaves].astype(np.float64)
    return counts / counts.sum(axis=1, keepdims=True)


def _tree_rng(seed, tree_index):
    return np.random.Generator(np.random.Philox(key=[seed, tree_index]))


def fit_forest(X, y, n_classes, n_estimators=130, max_depth=100,
               min_samples_split=2, features_per_split="sqrt",
               bootstrap=True, seed=0):
    """Bag of CART trees; tree t draws from a counter keyed (seed, t).

    ``features_per_split``: "sqrt" for floor(sqrt(d)), None for all
    features, or an explicit int. Each tree first draws its bootstrap
    rows, then its per-node feature subsets, so any single tree can be
    rebuilt without replaying the others.
    """
    n, d = X.shape
    m = _resolve_features(features_per_split, d)
    trees = []
    for t in range(n_estimators):
        rng = _tree_rng(seed, t)
        rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        trees.append(fit_tree(X[rows], y[rows], n_classes,
                              max_depth=max_depth,
                              min_samples_split=min_samples_split,
                              features_per_split=m, rng=rng))
    return trees


def _resolve_features(features_per_split, d):
    if features_per_split is None:
        return None
    if features_per_split == "sqrt":
        return max(1, int(np.sqrt(d)))
    m = int(features_per_split)
    if not 1 <= m <= d:
        raise ConfigError(
            f"features_per_split must be in 1..{d}, got {features_per_split}")
    return m


def forest_predict_proba(trees, X):
    """Average of per-tree leaf class distributions."""
    acc = np.zeros((len(X), trees[0].counts.shape[1]))
    for tree in trees:
        acc += tree_predict_proba(tree, X)
    return acc / len(trees)


def _importances(trees, n_features):
    imp = np.zeros(n_features)
    for tree in trees:
        t_imp = np.zeros(n_features)
        total = tree.counts[0].sum()
        internal = tree.feature >= 0
        np.add.at(t_imp, tree.feature[internal],
                  tree.counts[internal].sum(axis=1) / total
                  * tree.decrease[internal])
        s = t_imp.sum()
        if s > 0:
            imp += t_imp / s
    s = imp.sum()
    return imp / s if s > 0 else imp


# -- estimators ----------------------------------------------------------------


class CartTree(BaseEstimator):
    """Single CART classifier; considers every feature at every split."""

    def __init__(self, max_depth=100, min_samples_split=2,
                 features_per_split=None, seed=0):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.features_per_split = features_per_split
        self.seed = seed

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        check_seed(self.seed)
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        self.n_features_in_ = X.shape[1]
        m = _resolve_features(self.features_per_split, X.shape[1])
        self.tree_ = fit_tree(X, y_enc, len(self.classes_),
                              max_depth=self.max_depth,
                              min_samples_split=self.min_samples_split,
                              features_per_split=m,
                              rng=_tree_rng(self.seed, 0))
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "tree_")
        X = check_array(X, "X")
        return tree_predict_proba(self.tree_, X)

    def predict(self, X):
        proba = self.predict_proba(X)
        return self.classes_[np.argmax(proba, axis=1)]

    @property
    def feature_importances_(self):
        check_is_fitted(self, "tree_")
        return _importances([self.tree_], self.n_features_in_)


class GaussForest(BaseEstimator):
    """Random forest of CART trees with per-node feature subsampling."""

    def __init__(self, n_estimators=130, max_depth=100, min_samples_split=2,
                 features_per_split="sqrt", bootstrap=True, seed=0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.features_per_split = features_per_split
        self.bootstrap = bootstrap
        self.seed = seed

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        check_seed(self.seed)
        if self.n_estimators < 1:
            raise ConfigError("n_estimators must be positive")
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        self.n_features_in_ = X.shape[1]
        self.trees_ = fit_forest(X, y_enc, len(self.classes_),
                                 n_estimators=self.n_estimators,
                                 max_depth=self.max_depth,
                                 min_samples_split=self.min_samples_split,
                                 features_per_split=self.features_per_split,
                                 bootstrap=self.bootstrap, seed=self.seed)
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "trees_")
        X = check_array(X, "X")
        return forest_predict_proba(self.trees_, X)

    def predict(self, X):
        # exact probability ties take the lowest class id
        proba = self.predict_proba(X)
        return self.classes_[np.argmax(proba, axis=1)]

    @property
    def feature_importances_(self):
        check_is_fitted(self, "trees_")
        return _importances(self.trees_, self.n_features_in_)


# -- persistence ---------------------------------------------------------------


def _tree_to_dict(tree):
    return {
        "feature": tree.feature.tolist(),
        "threshold": tree.threshold.tolist(),
        "left": tree.left.tolist(),
        "right": tree.right.tolist(),
        "counts": tree.counts.tolist(),
        "decrease": tree.decrease.tolist(),
    }


def _tree_from_dict(data):
    return Tree(
        feature=np.asarray(data["feature"], dtype=np.int64),
        threshold=np.asarray(data["threshold"], dtype=np.float64),
        left=np.asarray(data["left"], dtype=np.int64),
        right=np.asarray(data["right"], dtype=np.int64),
        counts=np.asarray(data["counts"], dtype=np.int64),
        decrease=np.asarray(data["decrease"], dtype=np.float64),
    )


def save_model(path, model):
    """Serialize a fitted CartTree or GaussForest to canonical JSON.

    The encoding is key-sorted with no whitespace, so identical models
    produce identical bytes.
    """
    check_is_fitted(model, "classes_")
    if isinstance(model, GaussForest):
        kind = "forest"
        trees = model.trees_
    elif isinstance(model, CartTree):
        kind = "tree"
        trees = [model.tree_]
    else:
        raise ConfigError(f"cannot save a {type(model).__name__}")
    payload = {
        "format": _FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "n_features": int(model.n_features_in_),
        "classes": np.asarray(model.classes_).tolist(),
        "params": model.get_params(),
        "trees": [_tree_to_dict(t) for t in trees],
    }
    with open(path, "w", encoding="ascii") as handle:
        json.dump(payload, handle, sort_keys=True, separators=(",", ":"))
        handle.write("\n")


def load_model(path):
    """Inverse of save_model; raises PersistenceError on damage."""
    try:
        with open(path, "r", encoding="ascii") as handle:
            payload = json.load(handle)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise PersistenceError(f"{path}: not a model file ({exc})") from exc
    try:
        if payload["format"] != _FORMAT_NAME:
            raise PersistenceError(f"{path}: unrecognized format "
                                   f"{payload['format']!r}")
        if payload["format_version"] != FORMAT_VERSION:
            raise PersistenceError(
                f"{path}: format version {payload['format_version']} "
                f"is not supported (expected {FORMAT_VERSION})")
        kind = payload["kind"]
        cls = {"forest": GaussForest, "tree": CartTree}[kind]
        model = cls(**payload["params"])
        model.classes_ = np.asarray(payload["classes"])
        model.n_features_in_ = payload["n_features"]
        trees = [_tree_from_dict(t) for t in payload["trees"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise PersistenceError(f"{path}: malformed model file ({exc})") from exc
    if kind == "forest":
        model.trees_ = trees
    else:
        model.tree_ = trees[0]
    return model
