"""Pipeline configuration shared by all subcommands."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace

from .features.extract import FeatureConfig
from .features.flow import FlowParams
from .rd_models import parse_log_base
from .regression.forest import ForestHyper
from .regression.predictor import FEATURE_SETS, SPLIT_MODES


@dataclass(frozen=True)
class PipelineConfig:
    gop_len: int = 8
    max_frames: int = 240
    glcm_levels: int = 32
    glcm_offset: tuple[int, int] = (0, 1)
    ncc_window: int = 16
    ncc_stride: int = 16
    ncc_search: int = 8
    nlp_scales: int = 4
    tc_block: int = 32
    flow: FlowParams = field(default_factory=FlowParams)
    forest: ForestHyper = field(default_factory=ForestHyper)
    rfe_trees: int = 25
    rfe_folds: int = 10
    seed: int = 1
    relation_log_base: str = "10"
    split_by: str = "gop"
    feature_set: str = "rfe"
    test_fraction: float = 0.2

    def validate(self) -> "PipelineConfig":
        if self.gop_len < 3:
            raise ValueError("gop_len must be >= 3")
        if self.max_frames < self.gop_len:
            raise ValueError("max_frames must cover at least one GoP")
        if not 2 <= self.glcm_levels <= 256:
            raise ValueError("glcm_levels must be in [2, 256]")
        if self.glcm_offset == (0, 0):
            raise ValueError("glcm_offset must be non-zero")
        if self.ncc_window < 2 or self.ncc_stride < 1 or self.ncc_search < 0:
            raise ValueError("invalid NCC window/stride/search")
        if not 1 <= self.nlp_scales <= 8:
            raise ValueError("nlp_scales must be in [1, 8]")
        if self.tc_block < 1:
            raise ValueError("tc_block must be >= 1")
        self.forest.validate()
        if not 1 <= self.rfe_trees <= 1000:
            raise ValueError("rfe_trees must be in [1, 1000]")
        if self.rfe_folds < 2:
            raise ValueError("rfe_folds must be >= 2")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        parse_log_base(self.relation_log_base)
        if self.split_by not in SPLIT_MODES:
            raise ValueError(f"split_by must be one of {SPLIT_MODES}")
        if self.feature_set not in FEATURE_SETS:
            raise ValueError(f"feature_set must be one of {FEATURE_SETS}")
        if not 0 <= self.test_fraction < 1:
            raise ValueError("test_fraction must be in [0, 1)")
        return self

    def feature_config(self) -> FeatureConfig:
        return FeatureConfig(self.glcm_levels, tuple(self.glcm_offset), self.ncc_window,
                             self.ncc_stride, self.ncc_search, self.nlp_scales, self.tc_block, self.flow)

    @property
    def rfe_hyper(self) -> ForestHyper:
        return replace(self.forest, n_trees=self.rfe_trees)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["glcm_offset"] = list(self.glcm_offset)
        return d

    def to_json(self) -> str:
        """Compact, key-sorted form embedded in every output."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, obj: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        extra = set(obj) - known
        if extra:
            raise ValueError(f"unknown config keys: {', '.join(sorted(extra))}")
        kw = dict(obj)
        if "glcm_offset" in kw:
            kw["glcm_offset"] = tuple(int(v) for v in kw["glcm_offset"])
        if "flow" in kw:
            kw["flow"] = FlowParams(**kw["flow"])
        if "forest" in kw:
            kw["forest"] = ForestHyper(**kw["forest"])
        if "relation_log_base" in kw:
            kw["relation_log_base"] = str(kw["relation_log_base"])
        return cls(**kw).validate()

    def updated(self, **changes) -> "PipelineConfig":
        forest = {k[len("forest_"):]: changes.pop(k) for k in list(changes) if k.startswith("forest_")}
        cfg = replace(self, **changes)
        if forest:
            cfg = replace(cfg, forest=replace(cfg.forest, **forest))
        return cfg.validate()


CONFIG_PREFIX = "# config: "


def load_config(path) -> PipelineConfig:
    """Read a config JSON file, or the config embedded in a texrd output file."""
    with open(path) as fh:
        text = fh.read()
    for line in text.splitlines():
        if line.startswith(CONFIG_PREFIX):
            return PipelineConfig.from_dict(json.loads(line[len(CONFIG_PREFIX):]))
    start = text.find("<!--\n")
    if start >= 0:
        for line in text[start:].splitlines():
            if line.startswith("config: "):
                return PipelineConfig.from_dict(json.loads(line[len("config: "):]))
    obj = json.loads(text)
    if isinstance(obj, dict) and isinstance(obj.get("config"), dict):
        obj = obj["config"]
    return PipelineConfig.from_dict(obj)
