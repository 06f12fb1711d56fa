"""Seeded synthetic fleets with a known feature-to-RD relationship."""

from __future__ import annotations

import numpy as np

from .features.extract import N_FEATURES, FeatureVector
from .rd_models import RdCurve, RdFit, RdModelKind, eval_rd, relation_estimate

DEFAULT_QPS = (22, 27, 32, 37, 42)
DEFAULT_RATES = (0.01, 0.03, 0.1, 0.3, 1.0)


def exp_fleet(n_sequences: int = 120, gops: int = 30, seed: int = 1,
              rates=DEFAULT_RATES, relation_base="10"):
    """Features and RD curves where alpha4 = 20 + 10 * F1 exactly.

    F1 is uniform on [0, 1]; the other 43 features are standard normal noise.
    beta4 follows the parameter relation, so the Exp curve of every GoP is
    fully determined by F1. Returns (feature vectors, curves), key-ordered.
    """
    rng = np.random.default_rng(seed)
    feats, curves = [], []
    rates = np.asarray(rates, dtype=np.float64)
    for s in range(n_sequences):
        sid = f"seq{s:03d}"
        for g in range(gops):
            v = rng.standard_normal(N_FEATURES)
            v[0] = rng.random()
            params = relation_estimate(RdModelKind.EXP, {"alpha4": 20.0 + 10.0 * v[0]}, relation_base)
            q = eval_rd(RdFit(RdModelKind.EXP, params), rates)
            feats.append(FeatureVector(v, sid, g))
            curves.append(RdCurve.from_arrays(rates, q, sid, g, qps=DEFAULT_QPS[::-1][:len(rates)]
                                              if len(rates) <= len(DEFAULT_QPS) else None))
    return feats, curves
