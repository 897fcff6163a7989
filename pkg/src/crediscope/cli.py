"""Command-line front end: train, evaluate, explain, compare, serve.

Every command is deterministic given its flags and seed; JSON artifacts are
written with sorted keys so reruns are byte-identical (pass --frozen-clock
to pin the manifest timestamp). Exit codes: 0 ok, 2 configuration or data
error, 3 numerical failure.
"""
from __future__ import annotations

import functools
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np
import pandas as pd

from . import __version__
from .dataset import (
    Dataset,
    SplitConfig,
    derive_special_dummies,
    load_csv,
    schema_from_json,
    schema_to_json,
    split,
)
from .explain import breakdown, cp_profile, pd_profile, permutation_importance, shap_values
from .explain.profiles import default_grid, predict_one
from .metrics import evaluate
from .models import GradientBoostingPDModel, RcsLogisticModel, load_model, save_model
from .scorecard import ScorecardModel
from .validation import ConfigError, DataError, NumericError

FROZEN_TIME = "1970-01-01T00:00:00Z"


def _fail_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConfigError, DataError, FileNotFoundError, json.JSONDecodeError) as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(2)
        except NumericError as err:
            click.echo(f"numeric error: {err}", err=True)
            sys.exit(3)

    return wrapper


def _write_json(path: Path, doc) -> Path:
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out: Path, command: str, config: dict, frozen_clock: bool):
    artifacts = sorted(p for p in out.iterdir() if p.is_file() and p.name != "manifest.json")
    doc = {
        "tool": f"crediscope {__version__}",
        "created": FROZEN_TIME if frozen_clock else datetime.now(timezone.utc).isoformat(),
        "command": command,
        "config": config,
        "artifacts": [{"file": p.name, "sha256": _sha256(p)} for p in artifacts],
    }
    _write_json(out / "manifest.json", doc)


def _load_dataset(data: str, schema_path: str, with_dummies: bool) -> Dataset:
    doc = json.loads(Path(schema_path).read_text())
    schema, target = schema_from_json(doc)
    ds = load_csv(data, schema, target)
    if with_dummies:
        ds = derive_special_dummies(ds)
    return ds


def _reference_sample(train: Dataset, cap: int = 500, seed: int = 0) -> pd.DataFrame:
    df = train.df
    if len(df) > cap:
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(len(df), size=cap, replace=False))
        df = df.iloc[keep]
    return df.reset_index(drop=True)


@click.group()
@click.version_option(__version__)
def main():
    """Scorecard and challenger-model workbench."""


@main.command()
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--n", default=4000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@_fail_codes
def sample(out, n, seed):
    """Write a synthetic credit-bureau sample plus its schema."""
    from .datagen import write_sample

    csv_path, schema_path = write_sample(out, n=n, seed=seed)
    click.echo(f"wrote {csv_path} and {schema_path}")


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_kind", type=click.Choice(["scorecard", "gbm", "rcs"]), default="scorecard", show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--seed", default=0, show_default=True)
@click.option("--train-fraction", default=0.75, show_default=True)
@click.option("--min-miv", default=0.01, show_default=True)
@click.option("--min-rel-iv-gain", default=0.05, show_default=True)
@click.option("--rare-threshold", default=0.02, show_default=True)
@click.option("--chi2-alpha", default=0.1, show_default=True)
@click.option("--n-trees", default=100, show_default=True)
@click.option("--depth", default=3, show_default=True)
@click.option("--eta", default=0.1, show_default=True, help="GBM learning rate.")
@click.option("--min-leaf", default=10, show_default=True)
@click.option("--knots", default=5, show_default=True, help="Spline knots per continuous variable.")
@click.option("--frozen-clock", is_flag=True, help="Pin the manifest timestamp (reproducibility tests).")
@_fail_codes
def train(data, schema_path, model_kind, out, seed, train_fraction, min_miv, min_rel_iv_gain,
          rare_threshold, chi2_alpha, n_trees, depth, eta, min_leaf, knots, frozen_clock):
    """Fit a model on the training partition and write its artifact directory."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    with_dummies = model_kind == "scorecard"
    ds = _load_dataset(data, schema_path, with_dummies=with_dummies)
    train_ds, test_ds = split(ds, SplitConfig(train_fraction, seed))

    fit_log: dict = {"model": model_kind, "n_train": train_ds.n, "n_test": test_ds.n}
    if model_kind == "scorecard":
        est = ScorecardModel(
            schema=train_ds.schema,
            min_miv=min_miv,
            min_rel_iv_gain=min_rel_iv_gain,
            rare_threshold=rare_threshold,
            alpha=chi2_alpha,
        ).fit(train_ds.X, train_ds.y)
        est.card_.metadata["name"] = "scorecard"
        save_model(est, out / "scorecard.json")
        _write_json(
            out / "bins.json",
            {"schemes": [s.to_json() for s in est.transformer_.schemes_]},
        )
        from .binning import check_monotonicity

        monotonicity = {}
        for scheme in est.transformer_.schemes_:
            if scheme.monotone_constraint != "none":
                monotonicity[scheme.variable] = [
                    {"bins": [v.index_a, v.index_b], "rates": [v.rate_a, v.rate_b]}
                    for v in check_monotonicity(scheme)
                ]
        fit_log.update(
            {
                "selected": est.selection_.selected,
                "selection_trace": [
                    {"variable": t["variable"], "miv": t["miv"]} for t in est.selection_.trace
                ],
                "iterations": est.fit_.n_iter,
                "log_likelihood": est.fit_.log_likelihood,
                "converged": est.fit_.converged,
                "monotonicity_violations": monotonicity,
            }
        )
    elif model_kind == "gbm":
        from .models.gbm import TUNED_N_TREES_RANGE

        lo, hi = TUNED_N_TREES_RANGE
        if not lo <= n_trees <= hi:
            click.echo(
                f"warning: --n-trees {n_trees} is outside the tuned range [{lo}, {hi}]",
                err=True,
            )
        est = GradientBoostingPDModel(
            n_trees=n_trees,
            interaction_depth=depth,
            learning_rate=eta,
            seed=seed,
            min_samples_leaf=min_leaf,
        ).fit(train_ds.X, train_ds.y)
        save_model(est, out / "gbm.json")
        fit_log.update(
            {
                "n_trees": n_trees,
                "train_deviance_first": est.train_deviance_[0],
                "train_deviance_last": est.train_deviance_[-1],
            }
        )
    else:
        est = RcsLogisticModel(knot_count=knots).fit(train_ds.X, train_ds.y)
        save_model(est, out / "rcs.json")
        fit_log.update(
            {
                "splined_variables": sorted(est.knots_),
                "iterations": est.fit_.n_iter,
                "log_likelihood": est.fit_.log_likelihood,
                "converged": est.fit_.converged,
            }
        )

    _reference_sample(train_ds).to_csv(out / "reference.csv", index=False)
    _write_json(out / "schema.json", schema_to_json(ds.schema, ds.target))
    _write_json(out / "fit_log.json", fit_log)
    config = {
        "data": str(data),
        "model": model_kind,
        "seed": seed,
        "train_fraction": train_fraction,
    }
    _write_manifest(out, "train", config, frozen_clock)
    click.echo(f"trained {model_kind} -> {out}")


def _load_models(paths):
    models = []
    for p in paths:
        models.append(load_model(p))
    names = [m.name for m in models]
    if len(set(names)) != len(names):
        raise ConfigError(f"model names collide: {names}; rename via the artifact's name field")
    return models


@main.command(name="evaluate")
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--model-file", "model_files", multiple=True, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--seed", default=0, show_default=True)
@click.option("--train-fraction", default=0.75, show_default=True)
@click.option("--frozen-clock", is_flag=True)
@_fail_codes
def evaluate_cmd(data, schema_path, model_files, out, seed, train_fraction, frozen_clock):
    """Measure models on the train/test split; writes reports and scatter data."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    ds = _load_dataset(data, schema_path, with_dummies=True)
    train_ds, test_ds = split(ds, SplitConfig(train_fraction, seed))
    models = _load_models(model_files)

    reports = [evaluate(m, train_ds, test_ds) for m in models]
    _write_json(out / "performance.json", {"reports": [r.to_json() for r in reports]})
    scatter = pd.DataFrame(
        {
            "model": [r.model for r in reports],
            "value_train": [r.value_train for r in reports],
            "value_test": [r.value_test for r in reports],
            "overfitting_gap": [r.overfitting_gap for r in reports],
        }
    )
    scatter.to_csv(out / "scatter.csv", index=False)
    _write_manifest(out, "evaluate", {"seed": seed, "train_fraction": train_fraction}, frozen_clock)
    for r in reports:
        click.echo(
            f"{r.model}: {r.measure} train {r.value_train:.4f} test {r.value_test:.4f} "
            f"gap {r.overfitting_gap:+.4f}"
        )


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--model-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--level", type=click.Choice(["global", "local"]), required=True)
@click.option("--obs", type=int, default=None, help="Row index for local explanations.")
@click.option("--top-k", default=5, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--seed", default=0, show_default=True)
@click.option("--repeats", default=5, show_default=True)
@click.option("--n-paths", default=25, show_default=True)
@click.option("--frozen-clock", is_flag=True)
@_fail_codes
def explain(data, schema_path, model_file, level, obs, top_k, out, seed, repeats, n_paths, frozen_clock):
    """Global (importance + response profiles) or local (waterfall + what-ifs) reports."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    ds = _load_dataset(data, schema_path, with_dummies=True)
    model = _load_models([model_file])[0]
    X, y = ds.X, ds.y

    if level == "global":
        report = permutation_importance(model, X, y, repeats=repeats, seed=seed)
        doc = report.to_json()
        if hasattr(model, "card"):
            doc["points_range"] = model.card.importance_by_points_range()
        _write_json(out / "importance.json", doc)
        pd.DataFrame(
            [
                {"variable": r.variable, "importance": r.importance, "loss_drop": r.loss_drop}
                for r in report.sorted_rows()
            ]
        ).to_csv(out / "importance.csv", index=False)
        rows = []
        for var in report.top(top_k):
            profile = pd_profile(model, X, var, seed=seed)
            rows.extend(
                {"variable": var, "z": z, "value": v}
                for z, v in zip(profile.grid, profile.values)
            )
            _write_json(out / f"pdp_{var}.json", profile.to_json())
        pd.DataFrame(rows).to_csv(out / "pdp.csv", index=False)
    else:
        if obs is None:
            raise ConfigError("local explanations need --obs")
        if not 0 <= obs < ds.n:
            raise ConfigError(f"unknown observation id {obs} (have {ds.n} rows)")
        record = X.iloc[obs]
        reference = _reference_sample(ds, cap=500, seed=seed)[X.columns]
        bd = breakdown(model, record, reference, order="greedy")
        if abs(bd.residual) > 1e-8:
            raise NumericError(f"breakdown completeness residual {bd.residual:.3g} exceeds 1e-8")
        sh = shap_values(model, record, reference, n_paths=n_paths, seed=seed)
        profiles = {}
        top_vars = [s["variable"] for s in bd.segments(top_k) if s["variable"] != "all other variables"]
        for var in top_vars:
            if pd.api.types.is_numeric_dtype(X[var]):
                grid = default_grid(X[var].to_numpy())
            else:
                grid = sorted(X[var].astype(str).unique())
            profiles[var] = cp_profile(model, record, var, grid, observation_id=str(obs)).to_json()
        doc = {
            "observation": int(obs),
            "prediction": predict_one(model, record),
            "breakdown": bd.to_json(top_k),
            "shap": sh.to_json(top_k),
            "cp_profiles": profiles,
        }
        _write_json(out / f"local_{obs}.json", doc)
        waterfall = pd.DataFrame(bd.to_json(top_k)["segments"])
        waterfall["cumulative"] = bd.baseline + waterfall["delta"].cumsum()
        waterfall.to_csv(out / f"waterfall_{obs}.csv", index=False)
    _write_manifest(out, f"explain-{level}", {"seed": seed, "top_k": top_k}, frozen_clock)
    click.echo(f"explanations -> {out}")


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--model-file", "model_files", multiple=True, required=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--top-k", default=5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--train-fraction", default=0.75, show_default=True)
@click.option("--frozen-clock", is_flag=True)
@_fail_codes
def compare(data, schema_path, model_files, out, top_k, seed, train_fraction, frozen_clock):
    """Champion-challenger report: importance overlap, profile overlays, performance."""
    if len(model_files) < 2:
        raise ConfigError("compare needs at least two --model-file arguments")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    ds = _load_dataset(data, schema_path, with_dummies=True)
    train_ds, test_ds = split(ds, SplitConfig(train_fraction, seed))
    models = _load_models(model_files)

    shared = set(models[0].feature_names)
    for m in models[1:]:
        shared &= set(m.feature_names)
    if not shared:
        click.echo("warning: feature sets are disjoint; nothing to overlay", err=True)

    importance = {
        m.name: permutation_importance(m, train_ds.X, train_ds.y, repeats=3, seed=seed)
        for m in models
    }
    overlap = {}
    for i, a in enumerate(models):
        for b in models[i + 1 :]:
            ta, tb = set(importance[a.name].top(top_k)), set(importance[b.name].top(top_k))
            overlap[f"{a.name}|{b.name}"] = len(ta & tb) / top_k

    overlay_vars = [
        v for v in importance[models[0].name].top(top_k) if v in shared
    ] or sorted(shared)[:1]
    for var in overlay_vars:
        rows = []
        grid = default_grid(train_ds.df[var].to_numpy()) if pd.api.types.is_numeric_dtype(
            train_ds.df[var]
        ) else sorted(train_ds.df[var].astype(str).unique())
        for m in models:
            profile = pd_profile(m, train_ds.X, var, grid=grid, seed=seed)
            rows.extend(
                {"model": m.name, "variable": var, "z": z, "value": v}
                for z, v in zip(profile.grid, profile.values)
            )
        pd.DataFrame(rows).to_csv(out / f"overlay_{var}.csv", index=False)

    reports = [evaluate(m, train_ds, test_ds) for m in models]
    doc = {
        "models": [m.name for m in models],
        "importance_overlap_top_k": {"k": top_k, "overlap": overlap},
        "top_variables": {name: rep.top(top_k) for name, rep in importance.items()},
        "overlay_variables": overlay_vars,
        "performance": [r.to_json() for r in reports],
    }
    _write_json(out / "compare.json", doc)
    pd.DataFrame([r.to_json() for r in reports]).to_csv(out / "performance.csv", index=False)
    _write_manifest(out, "compare", {"seed": seed, "top_k": top_k}, frozen_clock)
    click.echo(f"comparison -> {out}")


@main.command(name="score")
@click.option("--model-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--schema", "schema_path", type=click.Path(exists=True, dir_okay=False),
              help="Optional schema; lets derivable indicator columns be filled in.")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@_fail_codes
def score_cmd(model_file, data, schema_path, out):
    """Batch-score applicant rows with a scorecard; appends points and PD columns."""
    from .dataset import enrich_frame
    from .scorecard import score_frame

    model = _load_models([model_file])[0]
    if not hasattr(model, "card"):
        raise ConfigError("batch scoring needs a scorecard artifact")
    frame = pd.read_csv(data)
    if schema_path:
        schema, _target = schema_from_json(json.loads(Path(schema_path).read_text()))
        frame = enrich_frame(frame, schema)
    missing = [v for v in model.card.variable_names if v not in frame.columns]
    if missing:
        raise DataError(f"input lacks scorecard variables: {missing}")
    scored = score_frame(model.card, frame)
    scored.to_csv(out, index=False)
    click.echo(f"scored {len(scored)} rows -> {out}")


@main.command()
@click.option("--model-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8799, show_default=True)
@_fail_codes
def serve(model_dir, host, port):
    """Run the scoring and explanation HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(model_dir), host=host, port=port)


if __name__ == "__main__":
    main()
