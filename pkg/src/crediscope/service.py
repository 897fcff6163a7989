"""HTTP scoring and explanation service.

Serves every model artifact found in a run directory. Loaded state is
read-only; global reports are precomputed at startup (they are
population-level and expensive), local explanations are computed per
request against the capped reference sample shipped with the run.
All numbers in response bodies carry 10 significant digits.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pandas as pd
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .dataset import NUMERIC, enrich_record, load_csv, schema_from_json
from .explain import breakdown, cp_profile, pd_profile, permutation_importance, shap_values
from .explain.profiles import default_grid
from .models import load_model
from .validation import ConfigError, DataError

REFERENCE_FILE = "reference.csv"
SCHEMA_FILE = "schema.json"
NON_MODEL_FILES = {SCHEMA_FILE, "manifest.json", "fit_log.json", "bins.json", "performance.json"}


def _sig10(obj):
    """Round every float in a JSON-ish structure to 10 significant digits."""
    if isinstance(obj, float):
        if math.isfinite(obj):
            return float(f"{obj:.10g}")
        return obj
    if isinstance(obj, dict):
        return {k: _sig10(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sig10(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return _sig10(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


class ScoreRequest(BaseModel):
    applicant: dict


class ExplainLocalRequest(BaseModel):
    applicant: dict
    method: str = "breakdown"
    top_k: int = 3
    n_paths: int = 25
    seed: int = 0


class WhatIfRequest(BaseModel):
    applicant: dict
    variable: str
    grid: list | None = None


class _State:
    def __init__(self, model_dir: Path, pdp_sample_cap: int = 200):
        schema_doc = json.loads((model_dir / SCHEMA_FILE).read_text())
        self.schema, self.target = schema_from_json(schema_doc)
        self.kind = {c.name: c.kind for c in self.schema}
        self.specials = {c.name: c.special_codes for c in self.schema}

        ref_path = model_dir / REFERENCE_FILE
        if not ref_path.exists():
            raise ConfigError(f"{model_dir} lacks {REFERENCE_FILE}")
        reference = load_csv(ref_path, self.schema, self.target)
        self.reference = reference.df
        self.reference_y = reference.y

        self.models = {}
        for path in sorted(model_dir.glob("*.json")):
            if path.name in NON_MODEL_FILES:
                continue
            try:
                model = load_model(path)
            except DataError:
                continue
            if model.name in self.models:
                raise ConfigError(f"duplicate model name {model.name!r} in {model_dir}")
            self.models[model.name] = model
        if not self.models:
            raise ConfigError(f"no model artifacts found in {model_dir}")

        # population-level reports, computed once per loaded model
        self.global_reports = {}
        for name, model in self.models.items():
            importance = permutation_importance(
                model, self.reference, self.reference_y, repeats=3, seed=0
            )
            profiles = {}
            for var in model.feature_names:
                profiles[var] = pd_profile(
                    model, self.reference, var, sample_cap=pdp_sample_cap, seed=0
                ).to_json()
            entry = {"importance": importance.to_json(), "pdp": profiles}
            if hasattr(model, "card"):
                entry["points_range"] = model.card.importance_by_points_range()
            self.global_reports[name] = entry

    def model(self, name: str):
        model = self.models.get(name)
        if model is None:
            raise HTTPException(status_code=404, detail=f"unknown model {name!r}")
        return model

    def applicant_frame(self, model, applicant: dict) -> pd.DataFrame:
        record = enrich_record(applicant, self.schema)
        missing = [f for f in model.feature_names if f not in record]
        if missing:
            raise HTTPException(
                status_code=400,
                detail={"error": "missing fields", "fields": sorted(missing)},
            )
        bad = []
        clean = {}
        for field in model.feature_names:
            value = record[field]
            if self.kind.get(field, NUMERIC) == NUMERIC:
                try:
                    clean[field] = float(value)
                except (TypeError, ValueError):
                    bad.append(field)
            else:
                clean[field] = str(value)
        if bad:
            raise HTTPException(
                status_code=400,
                detail={"error": "non-numeric values", "fields": sorted(bad)},
            )
        return pd.DataFrame([clean])


def create_app(model_dir, pdp_sample_cap: int = 200) -> FastAPI:
    from fastapi.responses import JSONResponse

    state = _State(Path(model_dir), pdp_sample_cap=pdp_sample_cap)
    app = FastAPI(title="crediscope scoring service")
    app.state.scoring = state

    @app.exception_handler(DataError)
    async def _data_error(_request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/models")
    def list_models():
        return {
            "models": [
                {"name": name, "features": m.feature_names}
                for name, m in sorted(state.models.items())
            ],
            "schema": {
                "target": state.target,
                "columns": [
                    {"name": c.name, "kind": c.kind, "special_codes": sorted(c.special_codes)}
                    for c in state.schema
                ],
            },
        }

    @app.post("/models/{name}/score")
    def score(name: str, req: ScoreRequest):
        model = state.model(name)
        frame = state.applicant_frame(model, req.applicant)
        out = {"model": name, "pd": float(model.predict(frame)[0])}
        if hasattr(model, "card"):
            result = model.card.score(frame.iloc[0].to_dict())
            out["points"] = result.total_points
            out["intercept_points"] = result.intercept_points
            out["per_variable_points"] = result.per_variable_points
        return _sig10(out)

    @app.post("/models/{name}/explain/local")
    def explain_local(name: str, req: ExplainLocalRequest):
        model = state.model(name)
        frame = state.applicant_frame(model, req.applicant)
        record = frame.iloc[0]
        reference = state.reference
        if req.method == "breakdown":
            att = breakdown(model, record, reference, order="greedy")
            if abs(att.residual) >= 1e-8:
                raise HTTPException(
                    status_code=500,
                    detail=f"completeness residual {att.residual:.3g} exceeds 1e-8",
                )
        elif req.method == "shap":
            att = shap_values(model, record, reference, n_paths=req.n_paths, seed=req.seed)
        else:
            raise HTTPException(status_code=400, detail=f"unknown method {req.method!r}")
        return _sig10(att.to_json(top_k=req.top_k))

    @app.post("/models/{name}/whatif")
    def whatif(name: str, req: WhatIfRequest):
        model = state.model(name)
        frame = state.applicant_frame(model, req.applicant)
        record = frame.iloc[0]
        if req.variable not in model.feature_names:
            raise HTTPException(status_code=400, detail=f"unknown variable {req.variable!r}")
        grid = req.grid
        if grid is None:
            if state.kind.get(req.variable, NUMERIC) == NUMERIC:
                grid = list(default_grid(state.reference[req.variable].to_numpy(dtype=float)))
            else:
                grid = sorted(state.reference[req.variable].astype(str).unique())
        profile = cp_profile(model, record, req.variable, grid)
        return _sig10(profile.to_json())

    @app.get("/models/{name}/global")
    def global_report(name: str, kind: str = "", variable: str | None = None):
        state.model(name)
        reports = state.global_reports[name]
        if kind == "importance":
            out = {"model": name, "kind": kind, "report": reports["importance"]}
            if "points_range" in reports:
                out["points_range"] = reports["points_range"]
            return _sig10(out)
        if kind == "pdp":
            if not variable:
                raise HTTPException(status_code=400, detail="kind=pdp needs a variable")
            profile = reports["pdp"].get(variable)
            if profile is None:
                raise HTTPException(status_code=404, detail=f"no profile for {variable!r}")
            return _sig10({"model": name, "kind": kind, "profile": profile})
        raise HTTPException(status_code=400, detail="kind must be importance or pdp")

    return app
