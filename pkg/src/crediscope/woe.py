"""Weight-of-evidence encoding of binned variables.

WOE(bin) = ln(share of bads in bin / share of goods in bin), with shares
taken over the training counts stored in the binning schemes (zero cells
guarded by +0.5 on both classes). The fitted table is reused verbatim on
test or scoring data.
"""
from __future__ import annotations

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, TransformerMixin

from .binning import (
    BinningScheme,
    Interval,
    LevelSet,
    auto_bin_categorical,
    auto_bin_numeric,
    canonical_level,
    guarded_distributions,
)
from .dataset import CATEGORICAL, NUMERIC, ColumnSpec, Dataset
from .validation import DataError, check_frame


def bin_indices(scheme: BinningScheme, values) -> np.ndarray:
    """Vectorized bin index per value, honouring special codes and ``rest``."""
    values = np.asarray(values)
    n = len(values)
    out = np.full(n, -1, dtype=np.int64)

    special = [(i, b) for i, b in enumerate(scheme.bins) if b.is_special]
    ordinary = [(i, b) for i, b in enumerate(scheme.bins) if not b.is_special]

    if scheme.kind == NUMERIC:
        x = values.astype(float)
        if ordinary:
            # intervals may be stored in any order (published cards list some
            # variables best-bin first); sort by upper edge for the search
            def upper(b):
                return np.inf if b.definition.hi is None else b.definition.hi

            ordered = sorted(ordinary, key=lambda ib: upper(ib[1]))
            edges = [ib[1].definition.hi for ib in ordered[:-1]]
            pos = np.searchsorted(np.asarray(edges, dtype=float), x, side="left")
            out = np.asarray([i for i, _ in ordered], dtype=np.int64)[pos]
        for i, b in enumerate(scheme.bins):
            if b.is_special:
                for code in b.definition.codes:
                    out[x == code] = i
    else:
        canon = np.array([canonical_level(v) for v in values])
        mapping = {}
        rest_index = -1
        for i, b in ordinary:
            assert isinstance(b.definition, LevelSet)
            for lv in b.definition.levels:
                mapping[lv] = i
            if b.definition.rest:
                rest_index = i
        for i, b in special:
            for code in b.definition.codes:
                mapping[canonical_level(code)] = i
        for row, lv in enumerate(canon):
            out[row] = mapping.get(lv, rest_index)

    if (out < 0).any():
        bad_row = int(np.argmax(out < 0))
        raise DataError(
            f"uncovered value {values[bad_row]!r} for variable {scheme.variable!r}"
        )
    return out


class WoeTable:
    """Per-variable bin -> WOE mapping plus the reference class shares."""

    def __init__(self, schemes: list[BinningScheme]):
        self.schemes: dict[str, BinningScheme] = {s.variable: s for s in schemes}
        self._woe: dict[str, np.ndarray] = {}
        self.f_bad: dict[str, np.ndarray] = {}
        self.f_good: dict[str, np.ndarray] = {}
        for name, scheme in self.schemes.items():
            n_bad = np.array([b.n_bad for b in scheme.bins], dtype=float)
            n_good = np.array([b.n_good for b in scheme.bins], dtype=float)
            f1, f0, _ = guarded_distributions(n_bad, n_good)
            self.f_bad[name] = f1
            self.f_good[name] = f0
            self._woe[name] = np.log(f1 / f0)

    @property
    def variables(self) -> list[str]:
        return list(self.schemes)

    def woe_values(self, var: str) -> np.ndarray:
        return self._woe[var]

    def encode_column(self, var: str, values) -> np.ndarray:
        idx = bin_indices(self.schemes[var], values)
        return self._woe[var][idx]

    def transform(self, df: pd.DataFrame) -> pd.DataFrame:
        """Replace every covered column by its WOE values; others pass through."""
        check_frame(df)
        out = df.copy()
        for var in self.schemes:
            if var in out.columns:
                out[var] = self.encode_column(var, out[var].to_numpy())
        return out


def woe_transform(ds: Dataset, schemes: list[BinningScheme]) -> tuple[Dataset, WoeTable]:
    """Encode a dataset's covered variables as WOE columns.

    Returns the encoded dataset (covered columns become plain numerics) and
    the reusable table. Test data must be pushed through the same table so
    it sees the training WOEs.
    """
    table = WoeTable(schemes)
    df = table.transform(ds.df)
    schema = []
    for spec in ds.schema:
        if spec.name in table.schemes:
            schema.append(ColumnSpec(spec.name, NUMERIC))
        else:
            schema.append(spec)
    return Dataset(df, schema, ds.target), table


def information_value(scheme_or_column, y=None) -> float:
    """IV of a binning scheme, or of an encoded column against a target.

    For a column, rows are grouped by distinct value (each distinct WOE value
    is one bin) and the counting formula is applied with the usual zero-cell
    guard.
    """
    if isinstance(scheme_or_column, BinningScheme):
        n_bad = np.array([b.n_bad for b in scheme_or_column.bins], dtype=float)
        n_good = np.array([b.n_good for b in scheme_or_column.bins], dtype=float)
    else:
        if y is None:
            raise DataError("information_value of a column requires the target")
        col = np.asarray(scheme_or_column, dtype=float)
        y = np.asarray(y, dtype=float)
        _, inverse = np.unique(col, return_inverse=True)
        n_bad = np.bincount(inverse, weights=y)
        n_good = np.bincount(inverse, weights=1 - y)
    f1, f0, _ = guarded_distributions(n_bad, n_good)
    return float(np.sum((f1 - f0) * np.log(f1 / f0)))


class WoeTransformer(BaseEstimator, TransformerMixin):
    """Binning + WOE encoding as one sklearn-style transformer.

    Fit learns one scheme per feature (numeric recursive splits, categorical
    pool-and-merge) unless prebuilt ``schemes`` are supplied, then encodes
    frames against the learned table.
    """

    def __init__(
        self,
        schema=None,
        schemes=None,
        min_rel_iv_gain: float = 0.05,
        rare_threshold: float = 0.02,
        alpha: float = 0.1,
        min_bin_frac: float = 0.01,
    ):
        self.schema = schema
        self.schemes = schemes
        self.min_rel_iv_gain = min_rel_iv_gain
        self.rare_threshold = rare_threshold
        self.alpha = alpha
        self.min_bin_frac = min_bin_frac

    def fit(self, X: pd.DataFrame, y=None):
        check_frame(X)
        if self.schemes is not None:
            fitted = list(self.schemes)
        else:
            if y is None:
                raise DataError("fitting WOE bins requires the target")
            specs = self.schema or [ColumnSpec(str(c), NUMERIC) for c in X.columns]
            specs = [s for s in specs if s.name in X.columns]
            df = X.copy()
            df["_target_"] = np.asarray(y, dtype=int)
            ds = Dataset(df, specs, "_target_")
            fitted = []
            for spec in specs:
                if spec.kind == CATEGORICAL:
                    fitted.append(
                        auto_bin_categorical(
                            ds, spec.name, rare_threshold=self.rare_threshold, alpha=self.alpha
                        )
                    )
                else:
                    fitted.append(
                        auto_bin_numeric(
                            ds,
                            spec.name,
                            min_rel_iv_gain=self.min_rel_iv_gain,
                            min_bin_frac=self.min_bin_frac,
                            monotone_constraint=spec.monotone,
                        )
                    )
        self.schemes_ = fitted
        self.table_ = WoeTable(fitted)
        return self

    def transform(self, X: pd.DataFrame) -> pd.DataFrame:
        from .validation import check_fitted

        check_fitted(self, "table_")
        return self.table_.transform(X)
