"""Additive attributions for a single prediction.

Both methods decompose f(x) - baseline into per-variable contributions,
where the baseline is the mean model response over a reference sample and
unfixed variables keep their reference values (empirical marginal
averaging). Breakdown fixes variables sequentially in one order (greedy:
largest absolute single-step change first); the path averaging variant
averages the per-variable contributions over many random orders, which
approximates Shapley values. Every single path telescopes from the
baseline to f(x), so completeness survives the averaging.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ..validation import ConfigError, DataError, check_frame
from .profiles import _as_frame, predict_one

PROBABILITY = "probability"
LINK = "link"


def _logit(p):
    p = np.clip(np.asarray(p, dtype=float), 1e-12, 1 - 1e-12)
    return np.log(p / (1 - p))


class _Scaled:
    """Model view whose responses live on the chosen scale."""

    def __init__(self, model, scale: str):
        if scale not in (PROBABILITY, LINK):
            raise ConfigError(f"unknown attribution scale {scale!r}")
        self.model = model
        self.scale = scale
        self.feature_names = model.feature_names
        self.name = model.name

    def predict(self, X):
        p = self.model.predict(X)
        return _logit(p) if self.scale == LINK else np.asarray(p, dtype=float)


@dataclass
class Attribution:
    observation_id: str
    model: str
    method: str  # "breakdown" or "shap"
    scale: str
    baseline: float
    prediction: float
    order: list[str]  # fix order for breakdown; empty for shap
    deltas: dict[str, float]
    spread: dict[str, float] = field(default_factory=dict)  # shap: std over paths
    n_paths: int = 1

    @property
    def residual(self) -> float:
        return self.baseline + sum(self.deltas.values()) - self.prediction

    def segments(self, top_k: int | None = None) -> list[dict]:
        """Waterfall rows, most influential first; the tail collapses into a remainder."""
        if self.method == "breakdown":
            ordered = [(v, self.deltas[v]) for v in self.order]
        else:
            ordered = sorted(self.deltas.items(), key=lambda kv: -abs(kv[1]))
        rows = [{"variable": v, "delta": d} for v, d in ordered]
        if top_k is not None and top_k < len(rows):
            head, tail = rows[:top_k], rows[top_k:]
            head.append(
                {
                    "variable": "all other variables",
                    "delta": float(sum(r["delta"] for r in tail)),
                }
            )
            rows = head
        return rows

    def to_json(self, top_k: int | None = None) -> dict:
        return {
            "observation_id": self.observation_id,
            "model": self.model,
            "method": self.method,
            "scale": self.scale,
            "baseline": self.baseline,
            "prediction": self.prediction,
            "order": self.order,
            "segments": self.segments(top_k),
            "deltas": self.deltas,
            "spread": self.spread,
            "n_paths": self.n_paths,
            "completeness_residual": self.residual,
        }


def _mean_response(model, state: pd.DataFrame) -> float:
    return float(np.mean(model.predict(state)))


def _walk_path(model, reference: pd.DataFrame, record: dict, path: list[str]) -> dict[str, float]:
    """Fix variables in ``path`` order; contribution = response change at each fix."""
    state = reference.copy()
    current = _mean_response(model, state)
    deltas = {}
    for var in path:
        state[var] = record[var]
        nxt = _mean_response(model, state)
        deltas[var] = nxt - current
        current = nxt
    return deltas


def breakdown(model, x, reference: pd.DataFrame, order="greedy", scale: str = PROBABILITY) -> Attribution:
    """Sequential-conditioning attribution for one record.

    ``order`` is 'greedy' (at each step fix the variable with the largest
    absolute single-step change from the current state, ties alphabetical)
    or an explicit list of all model variables.
    """
    record = _as_frame(x)
    scaled = _Scaled(model, scale)
    features = list(model.feature_names)
    missing = [v for v in features if v not in record]
    if missing:
        raise DataError(f"observation lacks variables {missing}")
    check_frame(reference, features)
    if len(reference) == 0:
        raise DataError("empty reference sample")

    state = reference.copy()
    baseline = _mean_response(scaled, state)

    if order == "greedy":
        fix_order: list[str] = []
        remaining = sorted(features)
        current = baseline
        deltas: dict[str, float] = {}
        while remaining:
            best_var, best_val = None, None
            for var in remaining:
                trial = state.copy()
                trial[var] = record[var]
                val = _mean_response(scaled, trial)
                if best_var is None or abs(val - current) > abs(best_val - current):
                    best_var, best_val = var, val
            state[best_var] = record[best_var]
            deltas[best_var] = best_val - current
            current = best_val
            fix_order.append(best_var)
            remaining.remove(best_var)
    else:
        fix_order = list(order)
        if sorted(fix_order) != sorted(features):
            raise ConfigError("explicit order must list every model variable exactly once")
        deltas = _walk_path(scaled, reference, record, fix_order)

    prediction = predict_one(scaled, record)
    return Attribution(
        observation_id=str(record.get("_id", "")),
        model=model.name,
        method="breakdown",
        scale=scale,
        baseline=baseline,
        prediction=prediction,
        order=fix_order,
        deltas=deltas,
    )


def shap_values(
    model,
    x,
    reference: pd.DataFrame,
    n_paths: int = 25,
    seed: int = 0,
    exhaustive: bool = False,
    scale: str = PROBABILITY,
) -> Attribution:
    """Per-variable contributions averaged over variable orderings.

    ``exhaustive=True`` enumerates every ordering (exact Shapley values for
    the marginal-average value function); otherwise ``n_paths`` uniform
    random orderings are drawn with the given seed. The per-variable spread
    (standard deviation over paths) is reported for stability reading.
    """
    record = _as_frame(x)
    scaled = _Scaled(model, scale)
    features = sorted(model.feature_names)
    missing = [v for v in features if v not in record]
    if missing:
        raise DataError(f"observation lacks variables {missing}")
    check_frame(reference, features)
    if len(reference) == 0:
        raise DataError("empty reference sample")
    if not exhaustive and n_paths < 1:
        raise ConfigError(f"n_paths must be >= 1, got {n_paths}")

    if exhaustive:
        if len(features) > 7:
            raise ConfigError("exhaustive orderings are limited to 7 variables")
        paths = [list(p) for p in itertools.permutations(features)]
    else:
        rng = np.random.default_rng(seed)
        paths = [[features[i] for i in rng.permutation(len(features))] for _ in range(n_paths)]

    baseline = _mean_response(scaled, reference)
    per_path = np.empty((len(paths), len(features)))
    for pi, path in enumerate(paths):
        deltas = _walk_path(scaled, reference, record, path)
        per_path[pi] = [deltas[v] for v in features]

    mean = per_path.mean(axis=0)
    std = per_path.std(axis=0)
    prediction = predict_one(scaled, record)
    return Attribution(
        observation_id=str(record.get("_id", "")),
        model=model.name,
        method="shap",
        scale=scale,
        baseline=baseline,
        prediction=prediction,
        order=[],
        deltas={v: float(m) for v, m in zip(features, mean)},
        spread={v: float(s) for v, s in zip(features, std)},
        n_paths=len(paths),
    )
