"""Versioned JSON artifacts for trained models."""
from __future__ import annotations

import json
from pathlib import Path

from ..scorecard import SCORECARD_FORMAT, Scorecard, ScorecardPredictor
from ..validation import DataError
from .gbm import GradientBoostingPDModel
from .spline import RcsLogisticModel

MODEL_FORMAT = "crediscope-model"


def save_model(model, path) -> Path:
    path = Path(path)
    if isinstance(model, Scorecard):
        doc = model.to_json()
    elif isinstance(model, ScorecardPredictor):
        doc = model.card.to_json()
    elif hasattr(model, "card_"):
        doc = model.card_.to_json()
    else:
        doc = model.to_json()
    path.write_text(json.dumps(doc, sort_keys=True, indent=2))
    return path


def load_model(path):
    """Load any model artifact; scorecards come back wrapped in the prediction contract."""
    doc = json.loads(Path(path).read_text())
    fmt = doc.get("format")
    if fmt == SCORECARD_FORMAT:
        name = doc.get("metadata", {}).get("name", "scorecard")
        return ScorecardPredictor(Scorecard.from_json(doc), name=name)
    if fmt != MODEL_FORMAT:
        raise DataError(f"{path}: not a model artifact (format={fmt!r})")
    kind = doc.get("type")
    if kind == "gbm":
        return GradientBoostingPDModel.from_json(doc)
    if kind == "rcs_logistic":
        return RcsLogisticModel.from_json(doc)
    raise DataError(f"{path}: unknown model type {kind!r}")
