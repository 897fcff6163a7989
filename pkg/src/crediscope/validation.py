"""Shared input-validation helpers and error types."""
from __future__ import annotations

import numpy as np
import pandas as pd


class ConfigError(ValueError):
    """Bad configuration or arguments (CLI exit code 2)."""


class DataError(ValueError):
    """Malformed or contract-violating data (CLI exit code 2)."""


class NumericError(RuntimeError):
    """Numerical failure such as non-convergence (CLI exit code 3)."""


class NotFittedError(RuntimeError):
    pass


def check_fitted(obj, attribute: str):
    if getattr(obj, attribute, None) is None:
        raise NotFittedError(f"{type(obj).__name__} is not fitted (missing {attribute})")


def check_frame(X, columns=None) -> pd.DataFrame:
    if not isinstance(X, pd.DataFrame):
        raise DataError(f"expected a DataFrame, got {type(X).__name__}")
    if columns is not None:
        missing = [c for c in columns if c not in X.columns]
        if missing:
            raise DataError(f"frame lacks required columns {missing}")
    return X


def check_binary_target(y) -> np.ndarray:
    y = np.asarray(y)
    values = set(np.unique(y))
    if not values <= {0, 1}:
        raise DataError(f"target must be 0/1, got values {sorted(values)}")
    if values != {0, 1}:
        raise DataError("target must contain both classes")
    return y.astype(int)


def round_half_away(x: float) -> int:
    """Round to the nearest integer, halves away from zero (np.round is half-even)."""
    import math

    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))
