"""Ranking performance and the train/test overfitting diagnostic.

AUC is the probability that a randomly drawn bad outranks a randomly drawn
good (ties count one half), computed from midranks in O(n log n). The
pluggable measure interface is loss-oriented (lower is better); AUC enters
as 1-AUC so that permutation importance reads as drop-out loss.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import rankdata

from .validation import DataError


def auc(scores, y) -> float:
    """Mann-Whitney AUC; higher score must mean higher probability of default."""
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(y)
    n_bad = int((y == 1).sum())
    n_good = int((y == 0).sum())
    if n_bad == 0 or n_good == 0:
        raise DataError("AUC needs both classes present")
    ranks = rankdata(scores)  # midranks for ties
    rank_sum = ranks[y == 1].sum()
    return float((rank_sum - n_bad * (n_bad + 1) / 2.0) / (n_bad * n_good))


@dataclass(frozen=True)
class Measure:
    """Loss-oriented measure: ``loss`` is what gets minimised and permuted against."""

    name: str
    value: Callable
    loss: Callable


MEASURES = {
    "auc": Measure(name="auc", value=auc, loss=lambda scores, y: 1.0 - auc(scores, y)),
}


def get_measure(measure) -> Measure:
    if isinstance(measure, Measure):
        return measure
    try:
        return MEASURES[measure]
    except KeyError:
        raise DataError(f"unknown measure {measure!r}") from None


@dataclass
class PerformanceReport:
    model: str
    measure: str
    value_train: float
    value_test: float
    loss_train: float
    loss_test: float

    @property
    def overfitting_gap(self) -> float:
        """value_train - value_test, i.e. test loss minus train loss: positive when overfit."""
        return self.value_train - self.value_test

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "measure": self.measure,
            "value_train": self.value_train,
            "value_test": self.value_test,
            "loss_train": self.loss_train,
            "loss_test": self.loss_test,
            "overfitting_gap": self.overfitting_gap,
        }


def evaluate(model, train, test, measure="auc") -> PerformanceReport:
    """Measure a model on both partitions of a dataset split."""
    m = get_measure(measure)
    missing = [f for f in model.feature_names if f not in train.df.columns]
    if missing:
        raise DataError(f"model features absent from data: {missing}")
    s_train = model.predict(train.X)
    s_test = model.predict(test.X)
    return PerformanceReport(
        model=model.name,
        measure=m.name,
        value_train=m.value(s_train, train.y),
        value_test=m.value(s_test, test.y),
        loss_train=m.loss(s_train, train.y),
        loss_test=m.loss(s_test, test.y),
    )
