from .base import (
    ExternalModelTable,
    FunctionModel,
    LookupModel,
    MeanTargetEncoder,
    PredictiveModel,
    wrap_external,
)
from .gbm import NAMED_GBM_CONFIGS, GbmConfig, GradientBoostingPDModel
from .serialize import load_model, save_model
from .spline import RcsConfig, RcsLogisticModel, default_knots, rcs_basis

__all__ = [
    "ExternalModelTable",
    "FunctionModel",
    "GbmConfig",
    "GradientBoostingPDModel",
    "LookupModel",
    "MeanTargetEncoder",
    "NAMED_GBM_CONFIGS",
    "PredictiveModel",
    "RcsConfig",
    "RcsLogisticModel",
    "default_knots",
    "load_model",
    "rcs_basis",
    "save_model",
    "wrap_external",
]
