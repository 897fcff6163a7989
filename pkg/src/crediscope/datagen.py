"""Synthetic home-equity credit-bureau samples for demos and desk-scale tests.

Column names and sentinel codes follow the public HELOC data dictionary
(23 covariates, special codes -9/-8/-7 meaning no record / no usable value
/ condition not met). The planted risk signal is strongest in
ExternalRiskEstimate and monotone in the usual directions, with a mild
interaction so tree ensembles have something nonlinear to find.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd

from .dataset import CATEGORICAL, NUMERIC, ColumnSpec, schema_to_json

TARGET = "RiskPerformance"

SPECIAL_CODED = [
    "AverageMInFile",
    "MSinceOldestTradeOpen",
    "MSinceMostRecentTradeOpen",
    "MSinceMostRecentDelq",
    "MSinceMostRecentInqexcl7days",
    "NetFractionRevolvingBurden",
    "NetFractionInstallBurden",
    "NumRevolvingTradesWBalance",
    "NumInstallTradesWBalance",
    "NumBank2NatlTradesWHighUtilization",
    "PercentTradesWBalance",
]

CATEGORICAL_COLUMNS = ["MaxDelq2PublicRecLast12M", "MaxDelqEver"]


def _z(v):
    return (v - v.mean()) / v.std()


def make_heloc_like(n: int = 4000, seed: int = 0, special_rate: float = 0.05):
    """Return (frame, schema, target_name) with ~46% bads."""
    rng = np.random.default_rng(seed)

    ere = np.clip(rng.normal(72, 10, n), 34, 94).round()
    msotp = np.clip(rng.gamma(4, 45, n), 2, 800).round()
    msmrtp = np.clip(rng.gamma(2, 6, n), 0, 300).round()
    avg_mif = np.clip(rng.normal(75, 32, n), 4, 380).round()
    num_sat = np.clip(rng.normal(20, 11, n), 0, 79).round()
    nt60 = rng.poisson(0.5, n)
    nt90 = np.minimum(rng.poisson(0.3, n), nt60)
    pct_never_delq = np.clip(rng.normal(87, 17, n), 0, 100).round()
    ms_delq = np.clip(rng.gamma(1.5, 14, n), 0, 83).round()
    num_total = np.clip(num_sat + rng.poisson(3, n), 1, 104)
    nt_open12 = np.clip(rng.poisson(1.7, n), 0, 19)
    pct_install = np.clip(rng.normal(33, 18, n), 0, 100).round()
    ms_inq = np.clip(rng.gamma(1.2, 2.0, n), 0, 24).round()
    num_inq6 = rng.poisson(1.4, n)
    num_inq6_ex7 = np.maximum(num_inq6 - rng.binomial(1, 0.3, n), 0)
    net_rev_burden = np.clip(rng.normal(34, 29, n), 0, 232).round()
    net_inst_burden = np.clip(rng.normal(48, 23, n), 0, 471).round()
    num_rev_bal = np.clip(rng.poisson(4, n), 0, 32)
    num_inst_bal = np.clip(rng.poisson(2, n), 0, 23)
    num_high_util = np.clip(rng.poisson(0.9, n), 0, 18)
    pct_bal = np.clip(rng.normal(66, 22, n), 0, 100).round()

    delq12 = rng.choice(["0", "3", "5", "6", "7", "9"], size=n, p=[0.07, 0.06, 0.09, 0.3, 0.47, 0.01])
    delq_ever = rng.choice(["2", "3", "4", "5", "6", "8"], size=n, p=[0.05, 0.07, 0.1, 0.2, 0.4, 0.18])

    delq12_effect = pd.Series(delq12).map(
        {"0": 0.8, "3": 0.6, "5": 0.3, "6": 0.0, "7": -0.3, "9": 0.1}
    ).to_numpy()
    delq_ever_effect = pd.Series(delq_ever).map(
        {"2": 0.7, "3": 0.5, "4": 0.3, "5": 0.1, "6": -0.2, "8": -0.4}
    ).to_numpy()

    logit = (
        -0.15
        - 1.05 * _z(ere)
        + 0.50 * _z(net_rev_burden)
        - 0.45 * _z(pct_never_delq)
        - 0.40 * _z(avg_mif)
        + 0.30 * _z(num_inq6)
        - 0.25 * _z(ms_delq)
        - 0.20 * _z(num_sat)
        + 0.15 * _z(pct_install)
        + 0.12 * _z(num_high_util)
        + 0.25 * delq12_effect
        + 0.15 * delq_ever_effect
        + 0.18 * _z(ere) * _z(net_rev_burden)
        + rng.normal(0, 0.35, n)
    )
    y = (rng.random(n) < 1 / (1 + np.exp(-logit))).astype(int)

    df = pd.DataFrame(
        {
            "ExternalRiskEstimate": ere,
            "MSinceOldestTradeOpen": msotp,
            "MSinceMostRecentTradeOpen": msmrtp,
            "AverageMInFile": avg_mif,
            "NumSatisfactoryTrades": num_sat,
            "NumTrades60Ever2DerogPubRec": nt60,
            "NumTrades90Ever2DerogPubRec": nt90,
            "PercentTradesNeverDelq": pct_never_delq,
            "MSinceMostRecentDelq": ms_delq,
            "MaxDelq2PublicRecLast12M": delq12,
            "MaxDelqEver": delq_ever,
            "NumTotalTrades": num_total,
            "NumTradesOpeninLast12M": nt_open12,
            "PercentInstallTrades": pct_install,
            "MSinceMostRecentInqexcl7days": ms_inq,
            "NumInqLast6M": num_inq6,
            "NumInqLast6Mexcl7days": num_inq6_ex7,
            "NetFractionRevolvingBurden": net_rev_burden,
            "NetFractionInstallBurden": net_inst_burden,
            "NumRevolvingTradesWBalance": num_rev_bal,
            "NumInstallTradesWBalance": num_inst_bal,
            "NumBank2NatlTradesWHighUtilization": num_high_util,
            "PercentTradesWBalance": pct_bal,
            TARGET: y,
        }
    )

    # sprinkle missing-observation sentinels on the coded columns
    for col in SPECIAL_CODED:
        hit = rng.random(n) < special_rate
        codes = rng.choice([-9.0, -8.0, -7.0], size=n, p=[0.6, 0.25, 0.15])
        df.loc[hit, col] = codes[hit]

    # directions a risk reviewer would demand on the headline drivers
    monotone = {
        "ExternalRiskEstimate": "decreasing",
        "PercentTradesNeverDelq": "decreasing",
        "NetFractionRevolvingBurden": "increasing",
    }
    schema = []
    for col in df.columns:
        if col == TARGET:
            continue
        if col in CATEGORICAL_COLUMNS:
            schema.append(ColumnSpec(col, CATEGORICAL))
        elif col in SPECIAL_CODED:
            schema.append(
                ColumnSpec(col, NUMERIC, frozenset({-9.0, -8.0, -7.0}), monotone.get(col, "none"))
            )
        else:
            schema.append(ColumnSpec(col, NUMERIC, frozenset(), monotone.get(col, "none")))
    return df, schema, TARGET


def write_sample(out_dir, n: int = 4000, seed: int = 0) -> tuple[Path, Path]:
    """Write heloc_sample.csv + schema.json into ``out_dir``; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    df, schema, target = make_heloc_like(n=n, seed=seed)
    csv_path = out / "heloc_sample.csv"
    schema_path = out / "schema.json"
    df.to_csv(csv_path, index=False)
    schema_path.write_text(json.dumps(schema_to_json(schema, target), indent=2, sort_keys=True))
    return csv_path, schema_path
