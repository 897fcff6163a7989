"""crediscope: scorecard construction and model-agnostic explanations for credit scoring."""

from .binning import (
    Bin,
    BinningScheme,
    Interval,
    LevelSet,
    SpecialCodes,
    auto_bin_categorical,
    auto_bin_numeric,
    check_monotonicity,
    merge_bins,
)
from .dataset import ColumnSpec, Dataset, SplitConfig, derive_special_dummies, load_csv, split
from .logistic import LogisticFit, fit_logistic
from .metrics import PerformanceReport, auc, evaluate
from .scorecard import (
    PointsModel,
    PointsScaling,
    Scorecard,
    ScorecardModel,
    ScorecardPredictor,
    forward_select_miv,
    scale_to_points,
    score,
    score_frame,
    scorecard_attribution,
)
from .woe import WoeTable, WoeTransformer, information_value, woe_transform

__version__ = "0.1.0"

__all__ = [
    "Bin",
    "BinningScheme",
    "ColumnSpec",
    "Dataset",
    "Interval",
    "LevelSet",
    "LogisticFit",
    "PerformanceReport",
    "PointsModel",
    "PointsScaling",
    "Scorecard",
    "ScorecardModel",
    "ScorecardPredictor",
    "SpecialCodes",
    "SplitConfig",
    "WoeTable",
    "WoeTransformer",
    "auc",
    "auto_bin_categorical",
    "auto_bin_numeric",
    "check_monotonicity",
    "derive_special_dummies",
    "evaluate",
    "fit_logistic",
    "forward_select_miv",
    "information_value",
    "load_csv",
    "merge_bins",
    "scale_to_points",
    "score",
    "score_frame",
    "scorecard_attribution",
    "split",
    "woe_transform",
]
