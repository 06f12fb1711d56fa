"""Recursive feature elimination driven by forest impurity importances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forest import ForestHyper, train_forest
from .validation import cv_mse


@dataclass
class RfeResult:
    selected: list[int]
    # ranking[j] = 1 for surviving features, larger = eliminated earlier
    ranking: list[int]
    # (subset size, inner-CV MSE) per elimination step
    history: list[tuple[int, float]]


def rfe_select(X, y, seed: int = 1, hyper: ForestHyper | None = None, folds: int = 10,
               step: float = 0.1, min_features: int = 1) -> RfeResult:
    """Drop the least important ``step`` fraction (at least one) per round.

    Every visited subset is scored by inner k-fold CV; the subset with the
    lowest error wins, the smaller one on ties.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    d = X.shape[1]
    if d == 0:
        raise ValueError("no features to select from")
    if not 0 < step < 1:
        raise ValueError("step must be in (0, 1)")
    folds = min(folds, len(y))
    current = list(range(d))
    subsets, history = [], []
    eliminated = []  # batches, earliest first
    while True:
        cols = np.array(current)
        err = cv_mse(X[:, cols], y, folds, seed, hyper)
        subsets.append(list(current))
        history.append((len(current), err))
        if len(current) <= min_features:
            break
        imp = train_forest(X[:, cols], y, hyper, seed).importances()
        n_drop = min(max(1, int(len(current) * step)), len(current) - min_features)
        # least important first; among equals drop the later column
        order = sorted(range(len(current)), key=lambda i: (imp[i], -current[i]))
        drop = {current[i] for i in order[:n_drop]}
        eliminated.append(sorted(drop))
        current = [c for c in current if c not in drop]

    best = min(range(len(subsets)), key=lambda i: (history[i][1], len(subsets[i])))
    ranking = [1] * d
    for rank, batch in enumerate(reversed(eliminated), start=2):
        for c in batch:
            ranking[c] = rank
    return RfeResult(subsets[best], ranking, history)
