"""Restricted (natural) cubic spline expansion and the spline logistic model.

The basis is linear beyond the boundary knots and C2 inside; with k knots a
variable expands to k-1 columns (the variable itself plus k-2 curvature
terms, normalised by the squared knot span for conditioning). Below the
first knot every curvature term is exactly zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator

from ..logistic import fit_logistic, sigmoid
from ..validation import ConfigError, check_fitted, check_frame
from .base import MeanTargetEncoder

DEFAULT_KNOT_QUANTILES = {5: (0.05, 0.275, 0.5, 0.725, 0.95)}


def rcs_basis(x, knots) -> np.ndarray:
    """Natural cubic spline basis columns for one variable.

    Columns: [x, c_1, ..., c_{k-2}] where
    c_j = (d_j - d_{k-2}) / (t_last - t_first)^2 and
    d_j(x) = ((x - t_j)+^3 - (x - t_last)+^3) / (t_last - t_j).
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(knots, dtype=float)
    if len(t) < 3:
        raise ConfigError(f"need at least 3 knots, got {len(t)}")
    if np.any(np.diff(t) <= 0):
        raise ConfigError(f"knots must be strictly increasing, got {t.tolist()}")
    k = len(t)
    span2 = (t[-1] - t[0]) ** 2

    def plus3(u):
        return np.clip(u, 0.0, None) ** 3

    def d(j):
        return (plus3(x - t[j]) - plus3(x - t[-1])) / (t[-1] - t[j])

    d_last = d(k - 2)
    cols = [x]
    for j in range(k - 2):
        cols.append((d(j) - d_last) / span2)
    return np.column_stack(cols)


def default_knots(values, count: int = 5) -> np.ndarray:
    """Quantile-placed knots; 5 knots use the customary (5, 27.5, 50, 72.5, 95)%."""
    if count < 3:
        raise ConfigError(f"knot count must be >= 3, got {count}")
    qs = DEFAULT_KNOT_QUANTILES.get(count)
    if qs is None:
        qs = tuple(np.linspace(0.05, 0.95, count))
    knots = np.unique(np.quantile(np.asarray(values, dtype=float), qs))
    return knots


@dataclass
class RcsConfig:
    knot_count: int = 5
    knots: dict[str, list[float]] = field(default_factory=dict)  # explicit per-variable knots
    spline_vars: list[str] | None = None  # None means every numeric column

    def __post_init__(self):
        if self.knot_count < 3:
            raise ConfigError(f"knot count must be >= 3, got {self.knot_count}")
        for var, t in self.knots.items():
            t = np.asarray(t, dtype=float)
            if len(t) < 3 or np.any(np.diff(t) <= 0):
                raise ConfigError(f"bad knots for {var!r}: {list(t)}")


class RcsLogisticModel(BaseEstimator):
    """Logistic regression with spline-expanded continuous variables.

    Variables whose data cannot support the requested knots (too few
    distinct values) stay linear. Categorical columns are ordinal-encoded
    by training default rate. With no spline variables this is a plain
    logistic regression.
    """

    def __init__(
        self,
        spline_vars=None,
        knot_count: int = 5,
        knots=None,
        tol: float = 1e-8,
        max_iter: int = 50,
        name: str = "rcs",
    ):
        self.spline_vars = spline_vars
        self.knot_count = knot_count
        self.knots = knots
        self.tol = tol
        self.max_iter = max_iter
        self.name = name

    def _expand(self, X: pd.DataFrame) -> pd.DataFrame:
        mat = self.encoder_.transform(X)[self.feature_names_]
        cols = {}
        for var in self.feature_names_:
            values = mat[var].to_numpy(dtype=float)
            knots = self.knots_.get(var)
            if knots is None:
                cols[var] = values
            else:
                basis = rcs_basis(values, knots)
                cols[var] = basis[:, 0]
                for j in range(1, basis.shape[1]):
                    cols[f"{var}_rcs{j}"] = basis[:, j]
        return pd.DataFrame(cols, index=X.index)

    def _standardize(self, design: pd.DataFrame) -> pd.DataFrame:
        # basis columns differ in scale by orders of magnitude; z-scoring keeps
        # the solve well conditioned and coefficients O(1)
        return (design - pd.Series(self.center_)) / pd.Series(self.scale_)

    def fit(self, X: pd.DataFrame, y):
        check_frame(X)
        if self.knot_count < 3:
            raise ConfigError(f"knot count must be >= 3, got {self.knot_count}")
        y = np.asarray(y, dtype=float)
        self.feature_names_ = [str(c) for c in X.columns]
        cat_cols = [c for c in X.columns if not pd.api.types.is_numeric_dtype(X[c])]
        self.encoder_ = MeanTargetEncoder().fit(X, y, cat_cols)

        wanted = self.spline_vars
        if wanted is None:
            wanted = [c for c in self.feature_names_ if c not in cat_cols]
        missing = [v for v in wanted if v not in self.feature_names_]
        if missing:
            raise ConfigError(f"spline variables absent from data: {missing}")
        bad_kind = [v for v in wanted if v in cat_cols]
        if bad_kind:
            raise ConfigError(f"spline variables must be numeric: {bad_kind}")

        explicit = self.knots or {}
        self.knots_ = {}
        encoded = self.encoder_.transform(X)
        for var in wanted:
            t = explicit.get(var)
            if t is None:
                t = default_knots(encoded[var].to_numpy(dtype=float), self.knot_count)
            else:
                t = np.asarray(t, dtype=float)
                if len(t) < 3 or np.any(np.diff(t) <= 0):
                    raise ConfigError(f"bad knots for {var!r}: {list(t)}")
            if len(t) >= 3:
                self.knots_[var] = np.asarray(t, dtype=float)

        design = self._expand(X)
        self.center_ = {c: float(design[c].mean()) for c in design.columns}
        self.scale_ = {
            c: float(s) if (s := design[c].std(ddof=0)) > 0 else 1.0 for c in design.columns
        }
        self.fit_ = fit_logistic(self._standardize(design), y, tol=self.tol, max_iter=self.max_iter)
        return self

    @property
    def feature_names(self) -> list[str]:
        check_fitted(self, "fit_")
        return self.feature_names_

    def decision_function(self, X: pd.DataFrame) -> np.ndarray:
        check_fitted(self, "fit_")
        check_frame(X, self.feature_names_)
        design = self._standardize(self._expand(X))
        beta = self.fit_.coefficients
        names = [c for c in beta.index if c != "intercept"]
        return beta["intercept"] + design[names].to_numpy() @ beta[names].to_numpy()

    def predict(self, X: pd.DataFrame) -> np.ndarray:
        return sigmoid(self.decision_function(X))

    def predict_proba(self, X: pd.DataFrame) -> np.ndarray:
        p = self.predict(X)
        return np.column_stack([1 - p, p])

    def deviance(self, X: pd.DataFrame, y) -> float:
        from ..logistic import log_likelihood

        return -2.0 * log_likelihood(np.asarray(y, dtype=float), self.predict(X))

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        check_fitted(self, "fit_")
        return {
            "format": "crediscope-model",
            "version": 1,
            "type": "rcs_logistic",
            "name": self.name,
            "params": {"knot_count": self.knot_count},
            "feature_names": self.feature_names_,
            "encoders": self.encoder_.to_json(),
            "knots": {v: list(map(float, t)) for v, t in self.knots_.items()},
            "center": self.center_,
            "scale": self.scale_,
            "coefficients": {k: float(v) for k, v in self.fit_.coefficients.items()},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RcsLogisticModel":
        from ..logistic import LogisticFit

        model = cls(knot_count=doc["params"]["knot_count"], name=doc.get("name", "rcs"))
        model.feature_names_ = list(doc["feature_names"])
        model.encoder_ = MeanTargetEncoder.from_json(doc["encoders"])
        model.knots_ = {v: np.asarray(t, dtype=float) for v, t in doc["knots"].items()}
        model.center_ = dict(doc["center"])
        model.scale_ = dict(doc["scale"])
        coef = pd.Series(doc["coefficients"])
        model.fit_ = LogisticFit(
            coefficients=coef, converged=True, n_iter=0, log_likelihood=float("nan")
        )
        return model
