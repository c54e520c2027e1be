"""From-scratch probability-scoring classifiers: L2 logistic regression and
a bagged decision-tree forest.

Logistic regression minimizes the negative log-likelihood plus
``||w||^2/(2C)`` on the raw-feature weights (bias unpenalized) by
Newton-Raphson with step halving.  The optimizer works in standardized
coordinates (training mean/std, a zero std becomes scale 1) purely for
conditioning — the penalty is mapped into those coordinates so the fitted
model is identical to a raw-space fit.  A singular Hessian falls back to a
gradient step; only exceeding ``max_iter`` aborts.

The forest bags ``tree_count`` depth-limited CART trees: each tree trains
on its own bootstrap resample (n draws with replacement), each split
examines ``max(1, floor(sqrt(d)))`` features drawn without replacement —
the standard random-forest subsampling size — and picks the threshold
with the largest Gini impurity reduction (midpoints of consecutive
distinct values), and leaves predict their positive-label fraction.
Tree t's generator is derived from (seed, t), so fits are deterministic
and trees independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calibrators import ScoreSet
from .datasets import Dataset
from .errors import DimensionMismatchError, NotConvergedError, SingleClassError
from ._util import readonly, sigmoid

__all__ = [
    "LogisticModel",
    "ForestModel",
    "Tree",
    "fit_logistic",
    "predict_logistic",
    "fit_forest",
    "predict_forest",
    "score_dataset",
    "model_to_json",
    "model_from_json",
]

# predicted probabilities are clamped strictly inside (0,1) by this margin
_PROB_MARGIN = 1e-15


@dataclass(frozen=True)
class LogisticModel:
    """Fitted logistic regression: predicts sigmoid(weights @ x + bias)."""

    weights: np.ndarray
    bias: float
    inverse_reg_strength: float
    iterations_used: int
    final_gradient_norm: float

    def __post_init__(self):
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        if w.ndim != 1:
            raise ValueError("weights must be a 1-D vector")
        object.__setattr__(self, "weights", readonly(w))

    @property
    def d(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class Tree:
    """Binary decision tree as parallel node arrays.

    ``feature[i] >= 0`` marks a split node (go left when
    ``x[feature] <= threshold``); ``feature[i] == -1`` marks a leaf whose
    prediction is ``value[i]`` (positive fraction of its training samples,
    ``count[i]`` of them).
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    count: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "feature", readonly(np.asarray(self.feature, dtype=np.intp)))
        object.__setattr__(self, "threshold", readonly(np.asarray(self.threshold, dtype=np.float64)))
        object.__setattr__(self, "left", readonly(np.asarray(self.left, dtype=np.intp)))
        object.__setattr__(self, "right", readonly(np.asarray(self.right, dtype=np.intp)))
        object.__setattr__(self, "value", readonly(np.asarray(self.value, dtype=np.float64)))
        object.__setattr__(self, "count", readonly(np.asarray(self.count, dtype=np.intp)))


@dataclass(frozen=True)
class ForestModel:
    """Bagged tree ensemble: predicts the mean of the trees' leaf fractions."""

    trees: tuple
    tree_count: int
    max_depth: int
    seed: int
    feature_count: int


# ---------------------------------------------------------------------------
# logistic regression
# ---------------------------------------------------------------------------

def fit_logistic(
    data: Dataset, C: float = 1.0, tol: float = 1e-8, max_iter: int = 100
) -> LogisticModel:
    """Fit L2-regularized logistic regression by damped Newton-Raphson.

    The penalty is ``||w||^2/(2C)`` on the raw-feature weights with the
    bias unpenalized.  Converged when the gradient max-norm (in the
    standardized optimization coordinates) is at most ``tol``; raises
    :class:`NotConvergedError` after ``max_iter`` Newton updates.
    """
    if C <= 0.0:
        raise ValueError(f"C must be > 0, got {C}")
    y = data.labels.astype(np.float64)
    n_pos = int(data.labels.sum())
    if n_pos == 0 or n_pos == data.n:
        raise SingleClassError("logistic regression needs both classes present")

    mu = data.features.mean(axis=0)
    sd = data.features.std(axis=0)
    sd = np.where(sd == 0.0, 1.0, sd)
    x = (data.features - mu) / sd
    d = data.d
    # the raw-space ridge ||w_raw||^2/(2C) expressed in standardized
    # coordinates (w_raw = w/sd) is a diagonal penalty with these weights
    ridge = 1.0 / (C * sd * sd)

    def objective(w: np.ndarray, b: float) -> float:
        z = x @ w + b
        return float(np.sum(np.logaddexp(0.0, z) - y * z)) + 0.5 * float(ridge @ (w * w))

    w = np.zeros(d)
    b = 0.0
    iterations = 0
    while True:
        z = x @ w + b
        p = sigmoid(z)
        resid = p - y
        grad_w = x.T @ resid + ridge * w
        grad_b = float(resid.sum())
        gnorm = max(float(np.abs(grad_w).max()) if d else 0.0, abs(grad_b))
        if gnorm <= tol:
            break
        if iterations >= max_iter:
            raise NotConvergedError(
                f"logistic fit: gradient norm {gnorm:.3e} > tol {tol:.1e} "
                f"after {max_iter} iterations"
            )
        wt = p * (1.0 - p)
        xw = x * wt[:, None]
        hess = np.empty((d + 1, d + 1))
        hess[:d, :d] = x.T @ xw + np.diag(ridge)
        hess[:d, d] = xw.sum(axis=0)
        hess[d, :d] = hess[:d, d]
        hess[d, d] = float(wt.sum())
        grad = np.append(grad_w, grad_b)
        try:
            step = np.linalg.solve(hess, -grad)
            if not np.isfinite(step).all():
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            step = -grad  # singular Hessian: plain gradient step
        current = objective(w, b)
        eta = 1.0
        for _ in range(60):
            cand_w = w + eta * step[:d]
            cand_b = b + eta * float(step[d])
            if objective(cand_w, cand_b) <= current:
                break
            eta *= 0.5
        else:
            raise NotConvergedError("logistic fit: line search found no descent step")
        w, b = cand_w, cand_b
        iterations += 1

    # fold the standardization into the reported raw-feature coefficients
    w_raw = w / sd
    b_raw = b - float(w_raw @ mu)
    return LogisticModel(
        weights=w_raw,
        bias=b_raw,
        inverse_reg_strength=C,
        iterations_used=iterations,
        final_gradient_norm=gnorm,
    )


def _as_feature_matrix(features, d: int) -> tuple:
    x = np.asarray(features, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != d:
        raise DimensionMismatchError(
            f"expected feature vectors of length {d}, got shape {np.shape(features)}"
        )
    return x, single


def predict_logistic(model: LogisticModel, features):
    """Predicted positive-class probability, strictly inside (0, 1).

    Accepts one length-d vector (returns a float) or an (n, d) matrix
    (returns a length-n vector).
    """
    x, single = _as_feature_matrix(features, model.d)
    p = sigmoid(x @ model.weights + model.bias)
    np.clip(p, _PROB_MARGIN, 1.0 - _PROB_MARGIN, out=p)
    return float(p[0]) if single else p


# ---------------------------------------------------------------------------
# bagged decision-tree forest
# ---------------------------------------------------------------------------

_MIN_GINI_GAIN = 1e-12


def _grow_tree(x: np.ndarray, y: np.ndarray, max_depth: int, mtry: int, rng) -> Tree:
    """CART on (x, y) with per-split feature subsampling.  Children are
    grown depth-first, left before right, so the generator's draw order —
    and hence the tree — is deterministic."""
    n, d = x.shape
    feature: list = []
    threshold: list = []
    left: list = []
    right: list = []
    value: list = []
    count: list = []

    def add_leaf(idx: np.ndarray) -> int:
        node = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(y[idx].mean()))
        count.append(idx.size)
        return node

    def grow(idx: np.ndarray, depth: int) -> int:
        m = idx.size
        pos = int(y[idx].sum())
        if depth >= max_depth or m < 2 or pos == 0 or pos == m:
            return add_leaf(idx)
        p = pos / m
        parent_gini = 2.0 * p * (1.0 - p)
        candidates = rng.choice(d, size=mtry, replace=False)
        best_gain = _MIN_GINI_GAIN
        best_feature = -1
        best_threshold = 0.0
        for f in candidates:
            xv = x[idx, f]
            order = np.argsort(xv, kind="mergesort")
            xs = xv[order]
            if xs[0] == xs[-1]:
                continue
            ys = y[idx[order]]
            pos_left = np.cumsum(ys)[:-1]
            n_left = np.arange(1, m, dtype=np.float64)
            n_right = m - n_left
            pos_right = pos - pos_left
            p_left = pos_left / n_left
            p_right = pos_right / n_right
            child = (
                n_left * 2.0 * p_left * (1.0 - p_left)
                + n_right * 2.0 * p_right * (1.0 - p_right)
            ) / m
            gain = parent_gini - child
            gain[xs[1:] == xs[:-1]] = -np.inf  # only boundaries between distinct values
            k = int(np.argmax(gain))
            if gain[k] > best_gain:
                best_gain = float(gain[k])
                best_feature = int(f)
                best_threshold = 0.5 * (float(xs[k]) + float(xs[k + 1]))
        if best_feature < 0:
            return add_leaf(idx)
        node = len(feature)
        feature.append(best_feature)
        threshold.append(best_threshold)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        count.append(m)
        go_left = x[idx, best_feature] <= best_threshold
        left_child = grow(idx[go_left], depth + 1)
        right_child = grow(idx[~go_left], depth + 1)
        left[node] = left_child
        right[node] = right_child
        return node

    grow(np.arange(n, dtype=np.intp), 0)
    return Tree(feature, threshold, left, right, value, count)


def fit_forest(
    data: Dataset,
    tree_count: int = 100,
    max_depth: int = 10,
    seed: int = 0,
) -> ForestModel:
    """Fit a bagged forest; deterministic for a fixed seed.

    Single-class data is allowed and yields single-leaf trees that predict
    that class's rate (1.0 or 0.0).
    """
    if tree_count < 1:
        raise ValueError(f"tree_count must be >= 1, got {tree_count}")
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    x = data.features
    y = data.labels
    mtry = max(1, math.isqrt(data.d))
    trees = []
    for t in range(tree_count):
        rng = np.random.default_rng([seed, t])
        boot = rng.integers(0, data.n, size=data.n)
        trees.append(_grow_tree(x[boot], y[boot], max_depth, mtry, rng))
    return ForestModel(
        trees=tuple(trees),
        tree_count=tree_count,
        max_depth=max_depth,
        seed=seed,
        feature_count=data.d,
    )


def _tree_predict(tree: Tree, x: np.ndarray) -> np.ndarray:
    node = np.zeros(x.shape[0], dtype=np.intp)
    while True:
        feats = tree.feature[node]
        active = np.flatnonzero(feats >= 0)
        if active.size == 0:
            return tree.value[node]
        current = node[active]
        go_left = x[active, tree.feature[current]] <= tree.threshold[current]
        node[active] = np.where(go_left, tree.left[current], tree.right[current])


def predict_forest(model: ForestModel, features):
    """Mean of the trees' leaf positive-fractions, in [0, 1].

    Accepts one length-d vector (returns a float) or an (n, d) matrix
    (returns a length-n vector).
    """
    x, single = _as_feature_matrix(features, model.feature_count)
    total = np.zeros(x.shape[0])
    for tree in model.trees:
        total += _tree_predict(tree, x)
    p = total / model.tree_count
    return float(p[0]) if single else p


# ---------------------------------------------------------------------------
# scoring and serialization
# ---------------------------------------------------------------------------

def score_dataset(model, data: Dataset) -> ScoreSet:
    """Pair each sample's predicted probability with its label, in order."""
    if isinstance(model, LogisticModel):
        scores = predict_logistic(model, data.features)
    elif isinstance(model, ForestModel):
        scores = predict_forest(model, data.features)
    else:
        raise TypeError(f"not a fitted model: {type(model).__name__}")
    return ScoreSet(scores, data.labels)


def model_to_json(model) -> dict:
    """Serialize a fitted model to its JSON-ready dict form."""
    if isinstance(model, LogisticModel):
        return {
            "logistic": {
                "weights": model.weights.tolist(),
                "bias": model.bias,
                "inverse_reg_strength": model.inverse_reg_strength,
                "iterations_used": model.iterations_used,
                "final_gradient_norm": model.final_gradient_norm,
            }
        }
    if isinstance(model, ForestModel):
        return {
            "forest": {
                "tree_count": model.tree_count,
                "max_depth": model.max_depth,
                "seed": model.seed,
                "feature_count": model.feature_count,
                "trees": [
                    {
                        "feature": tree.feature.tolist(),
                        "threshold": tree.threshold.tolist(),
                        "left": tree.left.tolist(),
                        "right": tree.right.tolist(),
                        "value": tree.value.tolist(),
                        "count": tree.count.tolist(),
                    }
                    for tree in model.trees
                ],
            }
        }
    raise TypeError(f"not a fitted model: {type(model).__name__}")


def model_from_json(payload: dict):
    """Inverse of :func:`model_to_json`."""
    if not isinstance(payload, dict) or len(payload) != 1:
        raise ValueError("model JSON must hold exactly one model kind")
    kind, body = next(iter(payload.items()))
    if kind == "logistic":
        return LogisticModel(
            weights=np.asarray(body["weights"], dtype=np.float64),
            bias=float(body["bias"]),
            inverse_reg_strength=float(body["inverse_reg_strength"]),
            iterations_used=int(body["iterations_used"]),
            final_gradient_norm=float(body["final_gradient_norm"]),
        )
    if kind == "forest":
        trees = tuple(
            Tree(
                feature=t["feature"],
                threshold=t["threshold"],
                left=t["left"],
                right=t["right"],
                value=t["value"],
                count=t["count"],
            )
            for t in body["trees"]
        )
        return ForestModel(
            trees=trees,
            tree_count=int(body["tree_count"]),
            max_depth=int(body["max_depth"]),
            seed=int(body["seed"]),
            feature_count=int(body["feature_count"]),
        )
    raise ValueError(f"unknown model kind {kind!r}")
