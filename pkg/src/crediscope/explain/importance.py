"""Permutation feature importance.

A variable's importance is the mean increase of the loss after shuffling
that column (fresh permutation per repeat, deterministic per seed). Both
sign conventions are kept on the row: ``importance`` = permuted - baseline
(positive means the model relies on the variable) and ``loss_drop`` its
negation, matching the form where the permuted loss is subtracted from the
baseline.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..metrics import get_measure
from ..validation import ConfigError, check_frame


@dataclass
class ImportanceRow:
    variable: str
    baseline_loss: float
    permuted_loss: float  # mean over repeats
    importance: float  # permuted - baseline
    loss_drop: float  # baseline - permuted
    permuted_losses: list[float]

    def to_json(self) -> dict:
        return {
            "variable": self.variable,
            "baseline_loss": self.baseline_loss,
            "permuted_loss": self.permuted_loss,
            "importance": self.importance,
            "loss_drop": self.loss_drop,
            "permuted_losses": self.permuted_losses,
        }


@dataclass
class ImportanceReport:
    model: str
    measure: str
    baseline_loss: float
    repeats: int
    seed: int
    rows: list[ImportanceRow]

    def sorted_rows(self) -> list[ImportanceRow]:
        return sorted(self.rows, key=lambda r: -r.importance)

    def top(self, k: int) -> list[str]:
        return [r.variable for r in self.sorted_rows()[:k]]

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "measure": self.measure,
            "baseline_loss": self.baseline_loss,
            "repeats": self.repeats,
            "seed": self.seed,
            "rows": [r.to_json() for r in self.sorted_rows()],
        }


def permutation_importance(
    model,
    df: pd.DataFrame,
    y,
    measure="auc",
    repeats: int = 5,
    seed: int = 0,
    columns=None,
) -> ImportanceReport:
    """Mean loss increase per permuted column.

    The permutation stream of each column is derived from ``seed`` and the
    column name, so results do not depend on column order and a column the
    model never reads gets an importance of exactly zero.
    """
    if repeats < 1:
        raise ConfigError(f"repeats must be >= 1, got {repeats}")
    check_frame(df, model.feature_names)
    m = get_measure(measure)
    y = np.asarray(y)
    columns = list(columns) if columns is not None else list(model.feature_names)

    baseline = m.loss(model.predict(df), y)
    rows = []
    for col in columns:
        rng = np.random.default_rng([seed, zlib.crc32(str(col).encode())])
        losses = []
        for _ in range(repeats):
            shuffled = df.copy()
            shuffled[col] = df[col].to_numpy()[rng.permutation(len(df))]
            losses.append(m.loss(model.predict(shuffled), y))
        mean_loss = float(np.mean(losses))
        rows.append(
            ImportanceRow(
                variable=str(col),
                baseline_loss=baseline,
                permuted_loss=mean_loss,
                importance=mean_loss - baseline,
                loss_drop=baseline - mean_loss,
                permuted_losses=[float(x) for x in losses],
            )
        )
    return ImportanceReport(
        model=model.name,
        measure=m.name,
        baseline_loss=baseline,
        repeats=repeats,
        seed=seed,
        rows=rows,
    )
