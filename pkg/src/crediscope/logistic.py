"""Maximum-likelihood logistic regression via iteratively reweighted least squares.

Plain unpenalized fit with an intercept. Step halving keeps the
log-likelihood non-decreasing across iterations; perfect separation is
detected through runaway coefficients, warned about, and returned with the
coefficients capped.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import scipy.linalg

from .validation import DataError, NumericError

_P_MIN = 1e-12


@dataclass
class LogisticFit:
    coefficients: pd.Series  # index: "intercept" + feature names
    converged: bool
    n_iter: int
    log_likelihood: float
    ll_trace: list[float] = field(default_factory=list)
    separation: bool = False

    @property
    def intercept(self) -> float:
        return float(self.coefficients["intercept"])

    def slopes(self) -> pd.Series:
        return self.coefficients.drop("intercept")

    def predict(self, X: pd.DataFrame) -> np.ndarray:
        names = [c for c in self.coefficients.index if c != "intercept"]
        z = self.intercept + X[names].to_numpy(dtype=float) @ self.slopes().to_numpy()
        return sigmoid(z)


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_likelihood(y, p) -> float:
    p = np.clip(p, _P_MIN, 1 - _P_MIN)
    return float(np.sum(y * np.log(p) + (1 - y) * np.log(1 - p)))


def _check_design(X: np.ndarray, names: list[str]):
    constant = [names[j] for j in range(X.shape[1]) if np.ptp(X[:, j]) == 0.0]
    if constant:
        raise DataError(f"constant columns duplicate the intercept: {constant}")
    seen: dict[bytes, str] = {}
    for j, name in enumerate(names):
        key = X[:, j].tobytes()
        if key in seen:
            raise DataError(f"columns {seen[key]!r} and {name!r} are identical")
        seen[key] = name


def fit_logistic(
    X,
    y,
    tol: float = 1e-8,
    max_iter: int = 50,
    coef_cap: float = 15.0,
) -> LogisticFit:
    """IRLS fit; converged when the score (gradient) max-norm drops below ``tol``.

    Raises NumericError when ``max_iter`` passes without convergence and no
    separation was detected.
    """
    if isinstance(X, pd.DataFrame):
        names = [str(c) for c in X.columns]
        mat = X.to_numpy(dtype=float)
    else:
        mat = np.asarray(X, dtype=float)
        if mat.ndim == 1:
            mat = mat[:, None]
        names = [f"x{j}" for j in range(mat.shape[1])]
    y = np.asarray(y, dtype=float)
    if set(np.unique(y)) != {0.0, 1.0}:
        raise DataError("target must contain both classes 0 and 1")
    _check_design(mat, names)

    design = np.column_stack([np.ones(len(mat)), mat])
    beta = np.zeros(design.shape[1])
    p = sigmoid(design @ beta)
    ll = log_likelihood(y, p)
    trace = [ll]
    separation = False
    converged = False
    n_updates = 0

    while n_updates < max_iter:
        grad = design.T @ (y - p)
        if np.max(np.abs(grad)) < tol:
            converged = True
            break
        w = np.clip(p * (1 - p), _P_MIN, None)
        hess = design.T @ (design * w[:, None])
        try:
            step = scipy.linalg.solve(hess, grad, assume_a="pos")
        except (scipy.linalg.LinAlgError, ValueError):
            step = np.linalg.lstsq(hess, grad, rcond=None)[0]

        # step halving globalizes Newton far from the optimum; once the
        # gradient is small, likelihood gains drop below float resolution and
        # the guard would stall, so the full (locally contractive) step is taken
        t = 1.0
        if np.max(np.abs(grad)) > 1e-3:
            while t > 1e-8 and log_likelihood(y, sigmoid(design @ (beta + t * step))) < ll:
                t /= 2.0
        beta = beta + t * step
        p = sigmoid(design @ beta)
        ll = log_likelihood(y, p)
        trace.append(ll)
        n_updates += 1

        if np.max(np.abs(beta)) > coef_cap:
            separation = True
            warnings.warn(
                f"perfect separation suspected: coefficients capped at +/-{coef_cap}",
                RuntimeWarning,
                stacklevel=2,
            )
            beta = np.clip(beta, -coef_cap, coef_cap)
            p = sigmoid(design @ beta)
            ll = log_likelihood(y, p)
            break

    if not converged and not separation:
        grad = design.T @ (y - p)
        if np.max(np.abs(grad)) < tol:
            converged = True
        else:
            raise NumericError(
                f"logistic fit did not converge in {max_iter} iterations "
                f"(gradient max-norm {np.max(np.abs(grad)):.3g})"
            )

    coefficients = pd.Series(beta, index=["intercept"] + names)
    return LogisticFit(
        coefficients=coefficients,
        converged=converged,
        n_iter=n_updates,
        log_likelihood=ll,
        ll_trace=trace,
        separation=separation,
    )
