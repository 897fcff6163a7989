"""Uniform prediction contract and adapters.

Every model in this package exposes ``name``, ``feature_names`` and
``predict(frame) -> array of PD in [0,1]``, is a pure function of its
inputs after fitting, and may be called concurrently.
"""
from __future__ import annotations

from typing import Protocol, runtime_checkable

import numpy as np
import pandas as pd

from ..validation import ConfigError, DataError, check_frame


@runtime_checkable
class PredictiveModel(Protocol):
    name: str
    feature_names: list[str]

    def predict(self, X: pd.DataFrame) -> np.ndarray: ...


class FunctionModel:
    """Wrap a plain callable (frame -> array) under the prediction contract."""

    def __init__(self, fn, feature_names, name="function"):
        self._fn = fn
        self.feature_names = list(feature_names)
        self.name = name

    def predict(self, X: pd.DataFrame) -> np.ndarray:
        check_frame(X, self.feature_names)
        return np.asarray(self._fn(X), dtype=float)


class MeanTargetEncoder:
    """Ordinal encoding of categorical levels by their training default rate.

    Levels are ranked by mean target ascending; unseen levels at prediction
    time get the middle rank.
    """

    def __init__(self):
        self.mapping_: dict[str, dict[str, float]] = {}

    @staticmethod
    def _key(v) -> str:
        return str(v)

    def fit(self, X: pd.DataFrame, y, columns) -> "MeanTargetEncoder":
        y = np.asarray(y, dtype=float)
        for col in columns:
            values = X[col].map(self._key)
            rates = pd.Series(y, index=X.index).groupby(values).mean()
            ordered = rates.sort_values(kind="stable").index
            self.mapping_[col] = {lv: float(r) for r, lv in enumerate(ordered)}
        return self

    def transform(self, X: pd.DataFrame) -> pd.DataFrame:
        out = X.copy()
        for col, mapping in self.mapping_.items():
            if col not in out.columns:
                continue
            middle = (len(mapping) - 1) / 2.0
            out[col] = out[col].map(lambda v: mapping.get(self._key(v), middle))
        return out

    def to_json(self) -> dict:
        return {col: mapping for col, mapping in self.mapping_.items()}

    @classmethod
    def from_json(cls, doc: dict) -> "MeanTargetEncoder":
        enc = cls()
        enc.mapping_ = {col: dict(mapping) for col, mapping in doc.items()}
        return enc


class ExternalModelTable:
    """Prediction table for a model trained elsewhere.

    Either keyed by ``row_id`` or by the full feature tuple; every PD must
    lie in [0,1] and keys must be unique.
    """

    PD_COLUMN = "pd"
    ROW_ID = "row_id"

    def __init__(self, frame: pd.DataFrame):
        check_frame(frame, [self.PD_COLUMN])
        pds = frame[self.PD_COLUMN].to_numpy(dtype=float)
        if np.any((pds < 0) | (pds > 1)) or np.any(~np.isfinite(pds)):
            bad = frame[self.PD_COLUMN][(pds < 0) | (pds > 1) | ~np.isfinite(pds)]
            raise DataError(f"prediction table has PDs outside [0,1]: {bad.head().tolist()}")
        self.by_row_id = self.ROW_ID in frame.columns
        self.feature_names = [
            c for c in frame.columns if c not in (self.PD_COLUMN, self.ROW_ID)
        ]
        if self.by_row_id:
            keys = frame[self.ROW_ID].tolist()
        else:
            if not self.feature_names:
                raise DataError("prediction table needs feature columns or a row_id column")
            keys = [tuple(row) for row in frame[self.feature_names].itertuples(index=False)]
        if len(set(keys)) != len(keys):
            raise DataError("prediction table keys are not unique")
        self.frame = frame.reset_index(drop=True)
        self._pd = dict(zip(keys, pds))

    @classmethod
    def from_csv(cls, path) -> "ExternalModelTable":
        return cls(pd.read_csv(path))

    def lookup_keys(self, X: pd.DataFrame):
        if self.by_row_id:
            check_frame(X, [self.ROW_ID])
            return X[self.ROW_ID].tolist()
        check_frame(X, self.feature_names)
        return [tuple(row) for row in X[self.feature_names].itertuples(index=False)]


class LookupModel:
    """PredictiveModel backed by an ExternalModelTable.

    ``policy`` is 'strict' (unknown keys raise) or 'nearest' (fall back to
    the Euclidean-nearest row on the numeric features).
    """

    def __init__(self, table: ExternalModelTable, policy: str = "strict", name: str = "external"):
        if policy not in ("strict", "nearest"):
            raise ConfigError(f"unknown lookup policy {policy!r}")
        if policy == "nearest" and table.by_row_id:
            raise ConfigError("nearest-key policy needs feature-keyed tables")
        self.table = table
        self.policy = policy
        self.name = name
        self.feature_names = (
            [table.ROW_ID] if table.by_row_id else list(table.feature_names)
        )
        if policy == "nearest":
            self._matrix = table.frame[table.feature_names].to_numpy(dtype=float)
            self._pds = table.frame[table.PD_COLUMN].to_numpy(dtype=float)

    def predict(self, X: pd.DataFrame) -> np.ndarray:
        keys = self.table.lookup_keys(X)
        out = np.empty(len(keys), dtype=float)
        missing = []
        for i, k in enumerate(keys):
            hit = self.table._pd.get(k)
            if hit is None:
                missing.append(i)
                out[i] = np.nan
            else:
                out[i] = hit
        if missing:
            if self.policy == "strict":
                raise DataError(
                    f"{len(missing)} rows have no entry in the prediction table "
                    f"(first miss at row {missing[0]})"
                )
            q = X[self.table.feature_names].to_numpy(dtype=float)[missing]
            d2 = ((q[:, None, :] - self._matrix[None, :, :]) ** 2).sum(axis=2)
            out[missing] = self._pds[np.argmin(d2, axis=1)]
        return out


def wrap_external(table: ExternalModelTable, policy: str = "strict", name: str = "external"):
    return LookupModel(table, policy=policy, name=name)
