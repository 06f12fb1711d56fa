"""Regression metrics and k-fold cross-validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..stats import pearson, spearman
from .forest import ForestHyper, predict_forest, train_forest

METRICS = ("pcc", "srocc", "r2", "mae", "nrmse")


def regression_metrics(y_true, y_pred) -> dict[str, float]:
    """PCC, SROCC, R^2, MAE and range-normalized RMSE.

    Correlations and R^2 are NaN for a constant target. NRMSE is 0 for a
    perfect prediction of a constant target and NaN otherwise.
    """
    t = np.asarray(y_true, dtype=np.float64)
    p = np.asarray(y_pred, dtype=np.float64)
    if t.shape != p.shape or t.size == 0:
        raise ValueError("y_true and y_pred must be non-empty and equally shaped")
    err = p - t
    rmse = math.sqrt(float(err @ err) / t.size)
    span = float(t.max() - t.min())
    ss_tot = float(((t - t.mean()) ** 2).sum())
    if span > 0:
        nrmse = rmse / span
    else:
        nrmse = 0.0 if rmse == 0 else math.nan
    return {
        "pcc": pearson(t, p) if span > 0 else math.nan,
        "srocc": spearman(t, p) if span > 0 else math.nan,
        "r2": 1.0 - float(err @ err) / ss_tot if ss_tot > 0 else math.nan,
        "mae": float(np.abs(err).mean()),
        "nrmse": nrmse,
    }


def fold_indices(n: int, folds: int, seed: int) -> list[np.ndarray]:
    """Seeded shuffle, then contiguous nearly equal folds."""
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if n < folds:
        raise ValueError(f"{n} rows cannot fill {folds} folds")
    perm = np.random.default_rng(seed).permutation(n)
    return np.array_split(perm, folds)


@dataclass
class CvReport:
    folds: int
    per_fold: list[dict[str, float]]
    aggregate: dict[str, float] = field(default_factory=dict)
    # (fold, metric) pairs left out of the aggregate as undefined
    excluded: list[tuple[int, str]] = field(default_factory=list)

    def to_json(self):
        return {"folds": self.folds, "per_fold": self.per_fold,
                "aggregate": self.aggregate, "excluded": [list(e) for e in self.excluded]}


def aggregate_folds(per_fold) -> tuple[dict[str, float], list[tuple[int, str]]]:
    agg, excluded = {}, []
    for name in METRICS:
        vals = []
        for i, m in enumerate(per_fold):
            if math.isnan(m[name]):
                excluded.append((i, name))
            else:
                vals.append(m[name])
        agg[name] = float(np.mean(vals)) if vals else math.nan
    return agg, excluded


def cross_validate(X, y, folds: int = 10, seed: int = 1, hyper: ForestHyper | None = None,
                   predict_fn=None) -> CvReport:
    """k-fold CV of the forest (or of ``predict_fn(X_train, y_train, X_test)``)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    parts = fold_indices(len(y), folds, seed)
    per_fold = []
    for k, test in enumerate(parts):
        train = np.concatenate([p for j, p in enumerate(parts) if j != k])
        if predict_fn is None:
            model = train_forest(X[train], y[train], hyper, seed)
            pred = predict_forest(model, X[test])
        else:
            pred = predict_fn(X[train], y[train], X[test])
        per_fold.append(regression_metrics(y[test], pred))
    agg, excluded = aggregate_folds(per_fold)
    return CvReport(folds, per_fold, agg, excluded)


def cv_mse(X, y, folds: int, seed: int, hyper: ForestHyper | None = None) -> float:
    """Pooled held-out mean squared error over k folds."""
    parts = fold_indices(len(y), folds, seed)
    sse = 0.0
    for k, test in enumerate(parts):
        train = np.concatenate([p for j, p in enumerate(parts) if j != k])
        model = train_forest(X[train], y[train], hyper, seed)
        err = predict_forest(model, X[test]) - y[test]
        sse += float(err @ err)
    return sse / len(y)
