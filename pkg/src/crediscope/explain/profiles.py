"""Response profiles: partial dependence (population) and ceteris paribus (one row).

A profile point at grid value z is the model response with the chosen
variable forced to z; partial dependence averages that over a sample, so it
is exactly the pointwise mean of the sample's ceteris paribus profiles.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..validation import ConfigError, DataError, check_frame


def default_grid(values, n: int = 101, lo_pct: float = 1.0, hi_pct: float = 99.0) -> np.ndarray:
    """Equally spaced grid between two percentiles of the observed values."""
    values = np.asarray(values, dtype=float)
    lo, hi = np.percentile(values, [lo_pct, hi_pct])
    if lo == hi:
        return np.array([lo])
    return np.linspace(lo, hi, n)


@dataclass
class PdProfile:
    model: str
    variable: str
    grid: list
    values: list[float]
    n_rows: int

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "variable": self.variable,
            "grid": list(self.grid),
            "values": self.values,
            "n_rows": self.n_rows,
        }


@dataclass
class CpProfile:
    model: str
    observation_id: str
    variable: str
    grid: list
    responses: list[float]
    anchor_value: object
    anchor_response: float

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "observation_id": self.observation_id,
            "variable": self.variable,
            "grid": list(self.grid),
            "responses": self.responses,
            "anchor": {"value": self.anchor_value, "response": self.anchor_response},
        }


def predict_one(model, x) -> float:
    """Model response for a single record (mapping or Series)."""
    frame = pd.DataFrame([dict(x)])
    value = float(model.predict(frame)[0])
    return value


def _as_frame(x) -> dict:
    if isinstance(x, pd.Series):
        return x.to_dict()
    return dict(x)


def cp_profile(model, x, variable, grid, observation_id: str = "") -> CpProfile:
    """One model-response curve: only ``variable`` moves, everything else is held."""
    record = _as_frame(x)
    if variable not in record:
        raise DataError(f"observation lacks variable {variable!r}")
    grid = list(grid)
    if not grid:
        raise ConfigError("grid must be non-empty")
    frame = pd.DataFrame([record] * len(grid))
    frame[variable] = grid
    responses = model.predict(frame)
    return CpProfile(
        model=model.name,
        observation_id=observation_id,
        variable=variable,
        grid=grid,
        responses=[float(v) for v in responses],
        anchor_value=record[variable],
        anchor_response=predict_one(model, record),
    )


def pd_profile(
    model,
    df: pd.DataFrame,
    variable,
    grid=None,
    sample_cap: int | None = 1000,
    seed: int = 0,
) -> PdProfile:
    """Mean response as one variable sweeps a grid, marginalising the rest.

    Large frames are subsampled to ``sample_cap`` rows with a fixed seed;
    pass ``sample_cap=None`` for the exact mean over every row.
    """
    check_frame(df, model.feature_names)
    if len(df) == 0:
        raise DataError("empty sample")
    sample = df
    if sample_cap is not None and len(df) > sample_cap:
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(len(df), size=sample_cap, replace=False))
        sample = df.iloc[keep]
    if grid is None:
        if pd.api.types.is_numeric_dtype(sample[variable]):
            grid = default_grid(sample[variable].to_numpy())
        else:
            grid = sorted(sample[variable].astype(str).unique())
    grid = list(grid)
    if not grid:
        raise ConfigError("grid must be non-empty")

    n = len(sample)
    tiled = pd.concat([sample] * len(grid), ignore_index=True)
    tiled[variable] = np.repeat(np.asarray(grid), n)
    preds = model.predict(tiled).reshape(len(grid), n)
    return PdProfile(
        model=model.name,
        variable=variable,
        grid=grid,
        values=[float(v) for v in preds.mean(axis=1)],
        n_rows=n,
    )
