"""Seeded random-forest regressor.

Each tree draws its bootstrap sample and split candidates from its own stream,
``default_rng([seed, tree_index])``, so results do not depend on how trees are
scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .. import kernels


@dataclass(frozen=True)
class ForestHyper:
    n_trees: int = 100
    max_depth: int = 16
    min_leaf: int = 5
    mtry: int | None = None  # None: ceil(d / 3)

    def validate(self):
        if not 1 <= self.n_trees <= 1000:
            raise ValueError(f"n_trees must be in [1, 1000], got {self.n_trees}")
        if not 1 <= self.max_depth <= 64:
            raise ValueError(f"max_depth must be in [1, 64], got {self.max_depth}")
        if self.min_leaf < 1:
            raise ValueError(f"min_leaf must be >= 1, got {self.min_leaf}")
        if self.mtry is not None and self.mtry < 1:
            raise ValueError(f"mtry must be >= 1, got {self.mtry}")
        return self

    def resolve_mtry(self, d: int) -> int:
        m = math.ceil(d / 3) if self.mtry is None else self.mtry
        return max(1, min(d, m))


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    right: np.ndarray
    value: np.ndarray
    gain: np.ndarray

    def to_json(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "gain": self.gain.tolist(),
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            np.asarray(obj["feature"], dtype=np.intp),
            np.asarray(obj["threshold"], dtype=np.float64),
            np.asarray(obj["right"], dtype=np.intp),
            np.asarray(obj["value"], dtype=np.float64),
            np.asarray(obj["gain"], dtype=np.float64),
        )


@dataclass
class ForestModel:
    trees: list[Tree]
    hyper: ForestHyper
    seed: int
    n_features: int

    def predict(self, X) -> np.ndarray:
        return predict_forest(self, X)

    def importances(self) -> np.ndarray:
        """Impurity decrease per feature, summed over trees, normalized to 1."""
        imp = np.zeros(self.n_features)
        for t in self.trees:
            split = t.feature >= 0
            np.add.at(imp, t.feature[split], t.gain[split])
        total = imp.sum()
        return imp / total if total > 0 else imp

    def to_json(self):
        return {
            "hyper": asdict(self.hyper),
            "seed": self.seed,
            "n_features": self.n_features,
            "trees": [t.to_json() for t in self.trees],
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            [Tree.from_json(t) for t in obj["trees"]],
            ForestHyper(**obj["hyper"]),
            int(obj["seed"]),
            int(obj["n_features"]),
        )


def _grow(X, y, presorted, hyper, mtry, seed, t):
    n = X.shape[0]
    rng = np.random.default_rng([seed, t])
    weight = np.bincount(rng.integers(0, n, n), minlength=n).astype(np.float64)
    m = int(np.count_nonzero(weight))
    # one block of mtry draws per internal node; a tree has < m internal nodes
    draws = rng.random(mtry * (2 * m + 1))
    arrays = kernels.build_tree(X, y, weight, presorted, hyper.max_depth,
                                float(hyper.min_leaf), mtry, draws)
    feature, threshold, right, value, gain, _ = arrays
    return Tree(np.asarray(feature), np.asarray(threshold), np.asarray(right),
                np.asarray(value), np.asarray(gain))


def _as_matrix(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    return X


def train_forest(X, y, hyper: ForestHyper | None = None, seed: int = 1, jobs: int = 1) -> ForestModel:
    hyper = (hyper or ForestHyper()).validate()
    X = _as_matrix(X)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n, d = X.shape
    if n == 0 or y.shape != (n,):
        raise ValueError(f"X has {n} rows but y has shape {y.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("training data contains non-finite values")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    mtry = hyper.resolve_mtry(d)
    presorted = np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T, dtype=np.intp)
    grow = lambda t: _grow(X, y, presorted, hyper, mtry, seed, t)  # noqa: E731
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            trees = list(ex.map(grow, range(hyper.n_trees)))
    else:
        trees = [grow(t) for t in range(hyper.n_trees)]
    return ForestModel(trees, hyper, int(seed), d)


def predict_forest(model: ForestModel, X) -> np.ndarray:
    """Mean of per-tree leaf values for each row of ``X`` (or a single row)."""
    single = np.ndim(X) == 1
    X = np.ascontiguousarray(X, dtype=np.float64)
    if single:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got shape {X.shape}")
    acc = np.zeros(X.shape[0])
    for t in model.trees:
        acc += kernels.predict_tree(X, t.feature, t.threshold, t.right, t.value)
    out = acc / len(model.trees)
    return out[0] if single else out
