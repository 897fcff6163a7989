from .attribution import Attribution, breakdown, shap_values
from .importance import ImportanceReport, ImportanceRow, permutation_importance
from .profiles import CpProfile, PdProfile, cp_profile, default_grid, pd_profile, predict_one

__all__ = [
    "Attribution",
    "CpProfile",
    "ImportanceReport",
    "ImportanceRow",
    "PdProfile",
    "breakdown",
    "cp_profile",
    "default_grid",
    "pd_profile",
    "permutation_importance",
    "predict_one",
    "shap_values",
]
