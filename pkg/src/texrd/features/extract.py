"""Per-GoP assembly of the 44 spatio-temporal feature statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coherence import temporal_coherence_stats
from .flow import FLOW_STAT_NAMES, FlowParams, farneback_flow, flow_statistics
from .glcm import compute_glcm, glcm_descriptors
from .moments import sample_std, stat_moments
from .ncc import ncc_peak_stats
from .pyramid import nlp_distance
from .wavelet import alpd

FEATURE_NAMES = (
    "meanGLCM_con", "stdGLCM_con", "meanGLCM_cor", "stdGLCM_cor", "meanGLCM_hom",
    "stdGLCM_hom", "meanGLCM_enr", "stdGLCM_enr", "meanGLCM_ent", "stdGLCM_ent",
    "NCC_mean", "NCC_std", "NCC_skw", "NCC_kur", "NCC_ent",
    "ALPD_mean", "ALPD_std",
    "NLP_mean", "NLP_std", "NLP_skw", "NLP_kur",
    "meanTC_mean", "stdTC_mean", "meanTC_std", "stdTC_std", "meanTC_skw", "stdTC_skw",
    "meanTC_kur", "stdTC_kur", "meanTC_ent", "stdTC_ent",
) + FLOW_STAT_NAMES
FEATURE_COLUMNS = tuple(f"F{i}" for i in range(1, len(FEATURE_NAMES) + 1))
N_FEATURES = len(FEATURE_NAMES)
assert N_FEATURES == 44


@dataclass(frozen=True)
class FeatureConfig:
    glcm_levels: int = 32
    glcm_offset: tuple[int, int] = (0, 1)
    ncc_window: int = 16
    ncc_stride: int = 16
    ncc_search: int = 8
    nlp_scales: int = 4
    tc_block: int = 32
    flow: FlowParams = field(default_factory=FlowParams)


@dataclass
class FeatureVector:
    values: np.ndarray
    sequence_id: str = ""
    gop_index: int = 0
    # feature name -> number of non-finite intermediates replaced by 0
    substitutions: dict = field(default_factory=dict)

    def __getitem__(self, key):
        if isinstance(key, str):
            if key.startswith("F") and key[1:].isdigit():
                return float(self.values[int(key[1:]) - 1])
            return float(self.values[FEATURE_NAMES.index(key)])
        return float(self.values[key])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(FEATURE_NAMES, map(float, self.values)))


_NAN_MOMENTS = (math.nan,) * 5


def _pair_moments(fn, *args):
    try:
        return fn(*args).as_tuple()
    except ValueError:
        return _NAN_MOMENTS


def extract_gop_features(frames, config: FeatureConfig | None = None,
                         sequence_id: str = "", gop_index: int = 0) -> FeatureVector:
    """Compute F1-F44 for one GoP of luma frames (at least 3)."""
    config = config or FeatureConfig()
    frames = [np.asarray(f) for f in frames]
    if len(frames) < 3:
        raise ValueError(f"need at least 3 frames per GoP, got {len(frames)}")
    shape = frames[0].shape
    if any(f.shape != shape for f in frames):
        raise ValueError("frames in a GoP must share one shape")
    pairs = list(zip(frames[:-1], frames[1:]))
    out: dict[str, float] = {}

    desc = np.array([
        (d.contrast, d.correlation, d.homogeneity, d.energy, d.entropy)
        for d in (glcm_descriptors(compute_glcm(f, config.glcm_levels, config.glcm_offset))
                  for f in frames)
    ])
    for col, tag in enumerate(("con", "cor", "hom", "enr", "ent")):
        out[f"meanGLCM_{tag}"] = float(desc[:, col].mean())
        out[f"stdGLCM_{tag}"] = sample_std(desc[:, col])

    ncc = np.array([
        _pair_moments(ncc_peak_stats, a, b, config.ncc_window, config.ncc_stride, config.ncc_search)
        for a, b in pairs
    ])
    for col, tag in enumerate(("mean", "std", "skw", "kur", "ent")):
        out[f"NCC_{tag}"] = float(ncc[:, col].mean())

    alpds = [alpd(f) for f in frames]
    out["ALPD_mean"] = float(np.mean(alpds))
    out["ALPD_std"] = sample_std(alpds)

    nlp = stat_moments([nlp_distance(a, b, config.nlp_scales) for a, b in pairs])
    out["NLP_mean"], out["NLP_std"] = nlp.mean, nlp.std
    out["NLP_skw"], out["NLP_kur"] = nlp.skewness, nlp.kurtosis

    tc = np.array([temporal_coherence_stats(a, b, config.tc_block).as_tuple() for a, b in pairs])
    for col, tag in enumerate(("mean", "std", "skw", "kur", "ent")):
        out[f"meanTC_{tag}"] = float(tc[:, col].mean())
        out[f"stdTC_{tag}"] = sample_std(tc[:, col])

    out.update(flow_statistics(farneback_flow(a, b, config.flow) for a, b in pairs))

    values = np.array([out[name] for name in FEATURE_NAMES], dtype=np.float64)
    bad = ~np.isfinite(values)
    subs = {FEATURE_NAMES[i]: 1 for i in np.flatnonzero(bad)}
    values[bad] = 0.0
    return FeatureVector(values, sequence_id, gop_index, subs)
