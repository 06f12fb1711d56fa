"""Feature-to-RD-curve predictor: normalizer, per-anchor forests, relations."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..features.extract import FEATURE_COLUMNS, N_FEATURES
from ..rd_models import RdFit, RdModelKind, relation_estimate
from .forest import ForestHyper, ForestModel, predict_forest, train_forest
from .rfe import rfe_select
from .validation import regression_metrics

MIN_ROWS = 50
SPLIT_MODES = ("gop", "sequence")
FEATURE_SETS = ("rfe", "published")

_COMMON = "F1, F4, F15, F22, F24, F26, F28, F30, F32-F35, F37"
# published feature subsets per anchor parameter
PUBLISHED_FEATURES = {
    ("Lin", "alpha1"): _COMMON,
    ("Poly2", "beta2"): _COMMON,
    ("Poly3", "alpha3"): "F1, F3, F4, F15, F22, F24, F26, F28, F30, F32-F35",
    ("Poly3", "beta3"): "F1, F4, F15, F22, F24, F26, F28, F30, F32, F33",
    ("Poly3", "gamma3"): "F1, F4, F5, F15, F22, F24, F26, F28, F30, F32-F35, F37",
    ("Exp", "alpha4"): _COMMON,
}


def parse_feature_list(text: str) -> list[int]:
    """'F1, F4, F32-F35' -> zero-based column indices."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, _, hi = part.partition("-")
        a = int(lo.strip().lstrip("F"))
        b = int(hi.strip().lstrip("F")) if hi else a
        if not 1 <= a <= b <= N_FEATURES:
            raise ValueError(f"bad feature reference {part!r}")
        out.extend(range(a - 1, b))
    return out


def format_feature_list(idx) -> str:
    """Inverse of parse_feature_list; runs of three or more become ranges."""
    idx = sorted(set(int(i) for i in idx))
    parts, start = [], 0
    while start < len(idx):
        end = start
        while end + 1 < len(idx) and idx[end + 1] == idx[end] + 1:
            end += 1
        if end - start >= 2:
            parts.append(f"{FEATURE_COLUMNS[idx[start]]}-{FEATURE_COLUMNS[idx[end]]}")
        else:
            parts.extend(FEATURE_COLUMNS[i] for i in idx[start:end + 1])
        start = end + 1
    return ", ".join(parts)


@dataclass
class Normalizer:
    means: np.ndarray
    stds: np.ndarray
    dropped: list[int]

    @classmethod
    def fit(cls, X):
        X = np.asarray(X, dtype=np.float64)
        means = X.mean(axis=0)
        stds = X.std(axis=0)
        dropped = [int(j) for j in np.flatnonzero(~(stds > 0))]
        return cls(means, stds, dropped)

    def transform(self, X) -> np.ndarray:
        """Standardize all columns; dropped columns become 0."""
        X = np.asarray(X, dtype=np.float64)
        safe = np.where(self.stds > 0, self.stds, 1.0)
        Z = (X - self.means) / safe
        Z[..., self.dropped] = 0.0
        return Z

    def inverse(self, Z) -> np.ndarray:
        return np.asarray(Z, dtype=np.float64) * np.where(self.stds > 0, self.stds, 1.0) + self.means

    def to_json(self):
        return {"means": self.means.tolist(), "stds": self.stds.tolist(), "dropped": self.dropped}

    @classmethod
    def from_json(cls, obj):
        return cls(np.asarray(obj["means"], dtype=np.float64),
                   np.asarray(obj["stds"], dtype=np.float64), list(obj["dropped"]))


@dataclass
class TrainedPredictor:
    rd_kind: RdModelKind
    normalizer: Normalizer
    selected_features: dict[str, list[int]]
    forests: dict[str, ForestModel]
    relation_base: str = "10"
    training_report: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rd_kind = RdModelKind(self.rd_kind)
        if set(self.forests) != set(self.rd_kind.anchors):
            raise ValueError(f"{self.rd_kind.value} predictor needs forests for {self.rd_kind.anchors}")

    def predict_params(self, X) -> np.ndarray:
        """(n, n_params) log10-domain parameters for raw feature rows."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != N_FEATURES:
            raise ValueError(f"expected {N_FEATURES} features, got {X.shape[1]}")
        if not np.all(np.isfinite(X)):
            raise ValueError("feature rows must be finite")
        Z = self.normalizer.transform(X)
        anchors = {p: predict_forest(self.forests[p], Z[:, self.selected_features[p]])
                   for p in self.rd_kind.anchors}
        out = np.empty((X.shape[0], self.rd_kind.n_params))
        for i in range(X.shape[0]):
            known = {p: float(v[i]) for p, v in anchors.items()}
            out[i] = relation_estimate(self.rd_kind, known, self.relation_base)
        return out

    def to_json(self):
        return {
            "version": __version__,
            "rd_kind": self.rd_kind.value,
            "relation_log_base": self.relation_base,
            "normalizer": self.normalizer.to_json(),
            "parameters": {
                p: {"selected_features": self.selected_features[p], "forest": self.forests[p].to_json()}
                for p in self.rd_kind.anchors
            },
            "training_report": self.training_report,
        }

    @classmethod
    def from_json(cls, obj):
        params = obj["parameters"]
        return cls(
            RdModelKind(obj["rd_kind"]),
            Normalizer.from_json(obj["normalizer"]),
            {p: list(v["selected_features"]) for p, v in params.items()},
            {p: ForestModel.from_json(v["forest"]) for p, v in params.items()},
            str(obj["relation_log_base"]),
            obj.get("training_report", {}),
        )

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(dumps(self.to_json()))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def dumps(obj) -> str:
    # allow_nan keeps undefined metrics as NaN rather than failing the write
    return json.dumps(obj, indent=1) + "\n"


def predict_rd_curve(predictor: TrainedPredictor, features) -> RdFit:
    """Predicted RdFit for one FeatureVector (goodness-of-fit left unset)."""
    params = predictor.predict_params(np.asarray(features.values)[None, :])[0]
    return RdFit(predictor.rd_kind, tuple(params), sequence_id=features.sequence_id,
                 gop_index=features.gop_index)


def split_rows(keys, mode: str = "gop", seed: int = 1, test_fraction: float = 0.2):
    """Seeded train/test split of (sequence_id, gop_index) keys.

    ``sequence`` mode keeps all GoPs of a sequence on one side.
    """
    if mode not in SPLIT_MODES:
        raise ValueError(f"split mode must be one of {SPLIT_MODES}")
    n = len(keys)
    rng = np.random.default_rng([seed, 8020])
    n_test = int(round(test_fraction * n))
    if mode == "gop":
        perm = rng.permutation(n)
        test = np.sort(perm[:n_test])
    else:
        seqs = sorted({k[0] for k in keys})
        if len(seqs) < 2:
            raise ValueError("sequence split needs at least 2 sequences")
        order = [seqs[i] for i in rng.permutation(len(seqs))]
        chosen, count = set(), 0
        sizes = {s: 0 for s in seqs}
        for k in keys:
            sizes[k[0]] += 1
        for s in order:
            if count >= n_test or len(chosen) == len(seqs) - 1:
                break
            chosen.add(s)
            count += sizes[s]
        test = np.array([i for i, k in enumerate(keys) if k[0] in chosen], dtype=np.intp)
    mask = np.zeros(n, dtype=bool)
    mask[test] = True
    return np.flatnonzero(~mask), np.flatnonzero(mask)


def join_rows(features, fits, kind):
    """Inner join on (sequence_id, gop_index), ordered by key."""
    kind = RdModelKind(kind)
    fmap = {}
    for fv in features:
        fmap[(fv.sequence_id, fv.gop_index)] = fv
    pmap = {}
    for f in fits:
        if f.kind is not kind:
            raise ValueError(f"fit {f.sequence_id}/{f.gop_index} is {f.kind.value}, expected {kind.value}")
        pmap[(f.sequence_id, f.gop_index)] = f
    keys = sorted(fmap.keys() & pmap.keys())
    unmatched = len(fmap) + len(pmap) - 2 * len(keys)
    if unmatched:
        warnings.warn(f"{unmatched} rows without a join partner were ignored", stacklevel=2)
    X = np.array([fmap[k].values for k in keys], dtype=np.float64).reshape(len(keys), N_FEATURES)
    P = np.array([pmap[k].params for k in keys], dtype=np.float64).reshape(len(keys), kind.n_params)
    return keys, X, P, unmatched


def train_predictor(features, fits, rd_kind, seed: int = 1, hyper: ForestHyper | None = None,
                    feature_set: str = "rfe", split_by: str = "gop", relation_base="10",
                    rfe_hyper: ForestHyper | None = None, rfe_folds: int = 10,
                    test_fraction: float = 0.2, jobs: int = 1) -> TrainedPredictor:
    kind = RdModelKind(rd_kind)
    if feature_set not in FEATURE_SETS:
        raise ValueError(f"feature set must be one of {FEATURE_SETS}")
    keys, X, P, unmatched = join_rows(features, fits, kind)
    if len(keys) < MIN_ROWS:
        raise ValueError(f"need >= {MIN_ROWS} joined rows, got {len(keys)}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(P))):
        raise ValueError("features and fitted parameters must be finite")
    hyper = hyper or ForestHyper()
    rfe_hyper = rfe_hyper or ForestHyper(n_trees=25, max_depth=hyper.max_depth,
                                         min_leaf=hyper.min_leaf, mtry=hyper.mtry)
    train, test = split_rows(keys, split_by, seed, test_fraction)
    norm = Normalizer.fit(X[train])
    Z = norm.transform(X)
    usable = [j for j in range(N_FEATURES) if j not in set(norm.dropped)]
    if not usable:
        # nothing varies: any single column yields a constant model
        usable = [0]

    names = kind.param_names
    selected, forests, rows = {}, {}, []
    pred_anchor = {}
    for p in kind.anchors:
        y = P[:, names.index(p)]
        entry = {"param": p, "source": "regressed"}
        if feature_set == "published":
            cols = [j for j in parse_feature_list(PUBLISHED_FEATURES[(kind.value, p)]) if j in usable]
            cols = cols or usable[:1]
        else:
            res = rfe_select(Z[np.ix_(train, usable)], y[train], seed, rfe_hyper, rfe_folds)
            cols = [usable[j] for j in res.selected]
            entry["rfe_history"] = [[k, e] for k, e in res.history]
        forest = train_forest(Z[np.ix_(train, cols)], y[train], hyper, seed, jobs)
        selected[p], forests[p] = cols, forest
        pred_anchor[p] = predict_forest(forest, Z[np.ix_(test, cols)])
        entry["features"] = format_feature_list(cols)
        rows.append(entry)

    pred = np.array([relation_estimate(kind, {p: float(v[i]) for p, v in pred_anchor.items()}, relation_base)
                     for i in range(len(test))]).reshape(len(test), kind.n_params)
    by_name = {r["param"]: r for r in rows}
    report_rows = []
    for j, p in enumerate(names):
        entry = by_name.get(p, {"param": p, "source": "relation", "features": f"{p}, relation"})
        entry.update(regression_metrics(P[test, j], pred[:, j]) if len(test) else {})
        report_rows.append(entry)
    report = {
        "split_by": split_by,
        "feature_set": feature_set,
        "n_train": int(len(train)),
        "n_test": int(len(test)),
        "unmatched_rows": int(unmatched),
        "dropped_features": [FEATURE_COLUMNS[j] for j in norm.dropped],
        "parameters": report_rows,
    }
    return TrainedPredictor(kind, norm, selected, forests, str(relation_base), report)
