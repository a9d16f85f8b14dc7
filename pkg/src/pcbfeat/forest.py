"""Gini-split decision-tree ensemble with impurity-decrease importances.

Each tree is CART on a bootstrap sample: at every node a random feature
subset is scanned in ascending index order, candidate thresholds are the
midpoints between consecutive distinct sorted values, and the split
maximizing the impurity decrease wins. Ties keep the lowest feature
index, then the lowest threshold, so fits are reproducible across
platforms and worker counts. A feature's importance is the sum over all
nodes that split on it of (node sample fraction x impurity decrease),
summed over trees and normalized to 1.
"""

import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator

from .errors import DegenerateTargetError, EmptyMatrixError
from .validation import check_feature_array


def gini_impurity(class_proportions):
    """1 - sum(p^2) of a probability vector."""
    p = np.asarray(class_proportions, dtype=np.float64)
    if p.size == 0 or (p < 0).any() or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"not a probability vector: {class_proportions}")
    return float(1.0 - np.sum(p * p))


def gini_gain(i_parent, i_left, i_right, p_left, p_right):
    """Impurity decrease of a split with child weights p_left, p_right."""
    if abs(p_left + p_right - 1.0) > 1e-9 or p_left < 0 or p_right < 0:
        raise ValueError(f"child weights must sum to 1: {p_left}, {p_right}")
    return float(i_parent - (p_left * i_left + p_right * i_right))


@dataclass
class _Node:
    counts: np.ndarray
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None

    @property
    def is_leaf(self):
        return self.feature < 0


def _node_impurity(counts, n):
    p = counts / n
    return 1.0 - float(np.sum(p * p))


def _best_split(X, y_idx, rows, features, n_classes, impurity):
    """Best (gain, feature, threshold) over the candidate features.

    Scans features in ascending index order and takes the first maximum,
    which realizes the lowest-feature / lowest-threshold tie-break.
    """
    n = rows.size
    best = (0.0, -1, 0.0)
    y_node = y_idx[rows]
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y_node] = 1.0
    total = onehot.sum(axis=0)
    for f in features:
        vals = X[rows, f]
        order = np.argsort(vals, kind="stable")
        vs = vals[order]
        valid = vs[:-1] < vs[1:]
        if not valid.any():
            continue
        cum = np.cumsum(onehot[order], axis=0)[:-1]
        nl = np.arange(1, n, dtype=np.float64)
        nr = n - nl
        sl = np.sum(cum * cum, axis=1)
        sr = np.sum((total - cum) ** 2, axis=1)
        gain = impurity - 1.0 + (sl / nl + sr / nr) / n
        gain[~valid] = -np.inf
        pos = int(np.argmax(gain))
        g = float(gain[pos])
        if g > best[0]:
            best = (g, f, float(0.5 * (vs[pos] + vs[pos + 1])))
    return best


def _grow(X, y_idx, rows, n_classes, n_total, rng, max_depth, min_samples_split,
          m_features, importances, depth):
    counts = np.bincount(y_idx[rows], minlength=n_classes).astype(np.float64)
    node = _Node(counts=counts)
    n = rows.size
    impurity = _node_impurity(counts, n)
    if (impurity <= 0.0 or n < min_samples_split
            or (max_depth is not None and depth >= max_depth)):
        return node
    n_feats = X.shape[1]
    if m_features >= n_feats:
        features = np.arange(n_feats)
    else:
        features = np.sort(rng.choice(n_feats, size=m_features, replace=False))
    gain, feature, threshold = _best_split(
        X, y_idx, rows, features, n_classes, impurity
    )
    if feature < 0 or gain <= 0.0:
        return node
    importances[feature] += (n / n_total) * gain
    go_left = X[rows, feature] <= threshold
    node.feature = feature
    node.threshold = threshold
    node.left = _grow(X, y_idx, rows[go_left], n_classes, n_total, rng,
                      max_depth, min_samples_split, m_features, importances,
                      depth + 1)
    node.right = _grow(X, y_idx, rows[~go_left], n_classes, n_total, rng,
                       max_depth, min_samples_split, m_features, importances,
                       depth + 1)
    return node


def _fit_tree(X, y_idx, n_classes, seed_seq, max_depth, min_samples_split,
              m_features, bootstrap):
    rng = np.random.default_rng(seed_seq)
    n = X.shape[0]
    rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
    importances = np.zeros(X.shape[1])
    root = _grow(X, y_idx, rows, n_classes, n, rng, max_depth,
                 min_samples_split, m_features, importances, 0)
    return root, importances


def _tree_counts(node, X, rows, out):
    if node.is_leaf or rows.size == 0:
        out[rows] += node.counts / node.counts.sum()
        return
    go_left = X[rows, node.feature] <= node.threshold
    _tree_counts(node.left, X, rows[go_left], out)
    _tree_counts(node.right, X, rows[~go_left], out)


class GiniRandomForest(BaseEstimator):
    """Random-forest classifier exposing normalized Gini importances.

    Parameters
    ----------
    n_trees : ensemble size
    max_depth : depth limit, or None for unbounded
    min_samples_split : smallest node the splitter will consider
    max_features : "sqrt" (rounded), an int, or None for all features
    bootstrap : draw each tree's sample with replacement
    random_state : seed; same seed and data give a bit-identical model
    n_jobs : trees fitted in parallel; results independent of worker count
    """

    def __init__(self, n_trees=100, max_depth=None, min_samples_split=2,
                 max_features="sqrt", bootstrap=True, random_state=0, n_jobs=1):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _m_features(self, n_features):
        if self.max_features is None or self.max_features == "all":
            return n_features
        if self.max_features == "sqrt":
            return max(1, round(math.sqrt(n_features)))
        m = int(self.max_features)
        if not 1 <= m <= n_features:
            raise ValueError(f"max_features {m} outside [1, {n_features}]")
        return m

    def fit(self, X, y):
        X = check_feature_array(X)
        y = np.asarray(y)
        if X.shape[0] == 0 or X.shape[1] == 0:
            raise EmptyMatrixError(f"cannot fit on shape {X.shape}")
        if y.shape[0] != X.shape[0]:
            raise ValueError("X and y row counts differ")
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        classes, y_idx = np.unique(y, return_inverse=True)
        if classes.size < 2:
            raise DegenerateTargetError(
                f"training labels contain a single class: {classes.tolist()}"
            )
        m = self._m_features(X.shape[1])
        seeds = np.random.SeedSequence(self.random_state).spawn(self.n_trees)
        results = Parallel(n_jobs=self.n_jobs)(
            delayed(_fit_tree)(X, y_idx, classes.size, s, self.max_depth,
                               self.min_samples_split, m, self.bootstrap)
            for s in seeds
        )
        self.classes_ = classes
        self.trees_ = [root for root, _ in results]
        raw = np.sum([imp for _, imp in results], axis=0)
        total = raw.sum()
        self.feature_importances_ = raw / total if total > 0 else raw
        self.n_features_in_ = X.shape[1]
        return self

    def predict_proba(self, X):
        X = check_feature_array(X, n_features=self.n_features_in_)
        votes = np.zeros((X.shape[0], self.classes_.size))
        rows = np.arange(X.shape[0])
        for tree in self.trees_:
            _tree_counts(tree, X, rows, votes)
        return votes / len(self.trees_)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]


def binarize_deciles(deciles, threshold=5):
    """Component-vs-background target: decile >= threshold means component."""
    return (np.asarray(deciles) >= threshold).astype(np.int64)
