"""Random-forest regression from texture features to RD-model parameters."""

from .forest import ForestHyper, ForestModel, Tree, predict_forest, train_forest
from .predictor import (
    PUBLISHED_FEATURES, Normalizer, TrainedPredictor, format_feature_list, join_rows, parse_feature_list,
    predict_rd_curve, split_rows, train_predictor,
)
from .rfe import RfeResult, rfe_select
from .validation import CvReport, cross_validate, fold_indices, regression_metrics

__all__ = [
    "ForestHyper", "ForestModel", "Tree", "predict_forest", "train_forest",
    "PUBLISHED_FEATURES", "Normalizer", "TrainedPredictor", "format_feature_list", "join_rows", "parse_feature_list",
    "predict_rd_curve", "split_rows", "train_predictor",
    "RfeResult", "rfe_select", "CvReport", "cross_validate", "fold_indices", "regression_metrics",
]
