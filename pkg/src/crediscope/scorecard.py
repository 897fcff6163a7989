"""Points-based scorecards on top of WOE logistic regression.

The card is an affine rescaling of the fitted logit: with factor =
pdo/ln 2 and offset = base_score - factor*ln(base_odds), a bin of variable
j is worth -factor * beta_j * WOE(bin) points and the intercept row keeps
the whole remainder offset - factor*beta_0. Bin points are rounded
half-away-from-zero; the unrounded card is retained for identity checks.
Higher points mean lower risk.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator

from .binning import Bin, BinningScheme, Interval, LevelSet, SpecialCodes
from .dataset import NUMERIC, ColumnSpec, Dataset
from .logistic import LogisticFit, fit_logistic
from .validation import ConfigError, DataError, check_fitted, check_frame, round_half_away
from .woe import WoeTable, WoeTransformer, bin_indices

SCORECARD_FORMAT = "crediscope-scorecard"


@dataclass(frozen=True)
class PointsScaling:
    base_score: float = 500.0
    base_odds: float = 50.0  # good:bad odds anchored at base_score
    pdo: float = 20.0  # points that double the odds

    @property
    def factor(self) -> float:
        return self.pdo / math.log(2.0)

    @property
    def offset(self) -> float:
        return self.base_score - self.factor * math.log(self.base_odds)

    def score_from_odds(self, odds: float) -> float:
        return self.base_score + self.factor * math.log(odds / self.base_odds)

    def pd_from_score(self, score: float) -> float:
        return 1.0 / (1.0 + math.exp((score - self.offset) / self.factor))


# ---------------------------------------------------------------------------
# forward selection on marginal information value


def marginal_iv(column, y, predicted) -> float:
    """MIV of a candidate column against a model's predicted default rates.

    Rows are grouped by the column's distinct values. The observed WOE comes
    from actual bad/good counts (zero cells guarded with +0.5); the implied
    WOE from the expected counts under the model (sums of p and 1-p).
    """
    col = np.asarray(column, dtype=float)
    y = np.asarray(y, dtype=float)
    p = np.asarray(predicted, dtype=float)
    _, inverse = np.unique(col, return_inverse=True)
    n_bad = np.bincount(inverse, weights=y)
    n_good = np.bincount(inverse, weights=1 - y)
    zero = (n_bad == 0) | (n_good == 0)
    gb, gg = n_bad + 0.5 * zero, n_good + 0.5 * zero
    f1_obs, f0_obs = gb / gb.sum(), gg / gg.sum()
    woe_obs = np.log(f1_obs / f0_obs)

    e_bad = np.bincount(inverse, weights=p)
    e_good = np.bincount(inverse, weights=1 - p)
    f1_imp = e_bad / e_bad.sum()
    f0_imp = e_good / e_good.sum()
    woe_imp = np.log(f1_imp / f0_imp)
    return float(np.sum((f1_obs - f0_obs) * (woe_obs - woe_imp)))


@dataclass
class SelectionResult:
    selected: list[str]
    trace: list[dict]  # per step: variable, miv, all considered MIVs
    fit: LogisticFit | None


def forward_select_miv(
    candidates: pd.DataFrame,
    y,
    min_miv: float = 0.01,
    tol: float = 1e-8,
    max_iter: int = 50,
) -> SelectionResult:
    """Greedy forward selection: add the highest-MIV candidate while it clears ``min_miv``.

    Against the empty model (constant predicted rate) MIV reduces to plain
    IV, so the strongest variable enters first. Ties break on column name.
    """
    check_frame(candidates)
    if candidates.shape[1] == 0:
        raise DataError("empty candidate set")
    y = np.asarray(y, dtype=float)
    names = sorted(str(c) for c in candidates.columns)

    selected: list[str] = []
    trace: list[dict] = []
    fit: LogisticFit | None = None
    predicted = np.full(len(y), y.mean())

    while len(selected) < len(names):
        remaining = [c for c in names if c not in selected]
        mivs = {c: marginal_iv(candidates[c], y, predicted) for c in remaining}
        best = max(remaining, key=lambda c: mivs[c])  # first max; names sorted
        best_miv = mivs[best]
        if best_miv < min_miv:
            break
        selected.append(best)
        fit = fit_logistic(candidates[selected], y, tol=tol, max_iter=max_iter)
        predicted = fit.predict(candidates)
        trace.append({"variable": best, "miv": best_miv, "considered": mivs})
    return SelectionResult(selected=selected, trace=trace, fit=fit)


# ---------------------------------------------------------------------------
# the card itself


@dataclass
class ScoreBin:
    definition: Interval | LevelSet | SpecialCodes
    points: int
    label: str = ""
    points_unrounded: float | None = None
    woe: float | None = None
    pop_share: float | None = None
    default_rate: float | None = None
    avg_pd: float | None = None

    def __post_init__(self):
        if not self.label:
            self.label = self.definition.label()


@dataclass
class ScorecardVariable:
    name: str
    kind: str
    bins: list[ScoreBin]
    coefficient: float | None = None
    mean_points: float | None = None

    def __post_init__(self):
        self._lookup = BinningScheme(
            self.name, self.kind, [Bin(b.definition, 0, 0) for b in self.bins]
        )

    def bin_index(self, value) -> int:
        return self._lookup.bin_index(value)

    def bin_indices(self, values) -> np.ndarray:
        return bin_indices(self._lookup, values)

    def points_for(self, value) -> int:
        return self.bins[self.bin_index(value)].points

    def points_range(self) -> int:
        pts = [b.points for b in self.bins]
        return max(pts) - min(pts)

    def mean_points_from_shares(self) -> float | None:
        if any(b.pop_share is None for b in self.bins):
            return None
        total = sum(b.pop_share for b in self.bins)
        if total == 0:
            return None
        return sum(b.points * b.pop_share for b in self.bins) / total


@dataclass
class ScoreResult:
    total_points: int
    intercept_points: int
    per_variable_points: dict[str, int]
    pd_estimate: float
    unrounded_total: float | None
    pd_from_unrounded: bool  # False means the PD was inverted from rounded points


@dataclass
class Scorecard:
    scaling: PointsScaling
    intercept_points: int
    variables: list[ScorecardVariable]
    intercept_unrounded: float | None = None
    population: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def variable_names(self) -> list[str]:
        return [v.name for v in self.variables]

    def variable(self, name: str) -> ScorecardVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    # -- scoring ----------------------------------------------------------
    def score(self, applicant) -> ScoreResult:
        """Total points, per-variable points and the implied PD for one record."""
        per_var: dict[str, int] = {}
        unrounded: float | None = self.intercept_unrounded
        for var in self.variables:
            if var.name not in applicant:
                raise DataError(f"applicant lacks value for {var.name!r}")
            idx = var.bin_index(applicant[var.name])
            b = var.bins[idx]
            per_var[var.name] = b.points
            if unrounded is not None:
                if b.points_unrounded is None:
                    unrounded = None
                else:
                    unrounded = unrounded + b.points_unrounded
        total = self.intercept_points + sum(per_var.values())
        if unrounded is not None:
            pd_est = self.scaling.pd_from_score(unrounded)
            exact = True
        else:
            pd_est = self.scaling.pd_from_score(float(total))
            exact = False
        return ScoreResult(
            total_points=total,
            intercept_points=self.intercept_points,
            per_variable_points=per_var,
            pd_estimate=pd_est,
            unrounded_total=unrounded,
            pd_from_unrounded=exact,
        )

    def points_matrix(self, X: pd.DataFrame) -> pd.DataFrame:
        """Vectorized per-variable points for a batch of raw records."""
        check_frame(X, self.variable_names)
        cols = {}
        for var in self.variables:
            idx = var.bin_indices(X[var.name].to_numpy())
            pts = np.array([b.points for b in var.bins], dtype=int)
            cols[var.name] = pts[idx]
        return pd.DataFrame(cols, index=X.index)

    def total_points(self, X: pd.DataFrame) -> np.ndarray:
        return self.points_matrix(X).sum(axis=1).to_numpy() + self.intercept_points

    def predict(self, X: pd.DataFrame) -> np.ndarray:
        """PD per row; exact (pre-rounding) when the unrounded card is present."""
        if self.intercept_unrounded is not None and all(
            b.points_unrounded is not None for v in self.variables for b in v.bins
        ):
            total = np.full(len(X), self.intercept_unrounded, dtype=float)
            for var in self.variables:
                idx = var.bin_indices(X[var.name].to_numpy())
                pu = np.array([b.points_unrounded for b in var.bins], dtype=float)
                total += pu[idx]
        else:
            total = self.total_points(X).astype(float)
        return 1.0 / (1.0 + np.exp((total - self.scaling.offset) / self.scaling.factor))

    def mean_total_points(self) -> float:
        means = [v.mean_points for v in self.variables]
        if any(m is None for m in means):
            raise DataError("card lacks per-variable mean points")
        return self.intercept_points + float(sum(means))

    def importance_by_points_range(self) -> dict[str, int]:
        """Spread between best and worst bin, the card-native importance measure."""
        return {v.name: v.points_range() for v in self.variables}

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        def encode_def(d):
            if isinstance(d, Interval):
                return {"type": "interval", "lo": d.lo, "hi": d.hi}
            if isinstance(d, LevelSet):
                return {"type": "levels", "levels": list(d.levels), "rest": d.rest}
            return {"type": "special", "codes": list(d.codes)}

        return {
            "format": SCORECARD_FORMAT,
            "version": 1,
            "scaling": {
                "base_score": self.scaling.base_score,
                "base_odds": self.scaling.base_odds,
                "pdo": self.scaling.pdo,
            },
            "intercept_points": self.intercept_points,
            "intercept_unrounded": self.intercept_unrounded,
            "population": self.population,
            "metadata": self.metadata,
            "variables": [
                {
                    "name": v.name,
                    "kind": v.kind,
                    "coefficient": v.coefficient,
                    "mean_points": v.mean_points,
                    "bins": [
                        {
                            "label": b.label,
                            "definition": encode_def(b.definition),
                            "points": b.points,
                            "points_unrounded": b.points_unrounded,
                            "woe": b.woe,
                            "pop_share": b.pop_share,
                            "default_rate": b.default_rate,
                            "avg_pd": b.avg_pd,
                        }
                        for b in v.bins
                    ],
                }
                for v in self.variables
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Scorecard":
        if doc.get("format") != SCORECARD_FORMAT:
            raise DataError("not a scorecard document")

        def decode_def(d):
            if d["type"] == "interval":
                return Interval(d["lo"], d["hi"])
            if d["type"] == "levels":
                return LevelSet(tuple(d["levels"]), d.get("rest", False))
            if d["type"] == "special":
                return SpecialCodes(tuple(d["codes"]))
            raise DataError(f"unknown bin definition type {d['type']!r}")

        variables = [
            ScorecardVariable(
                name=v["name"],
                kind=v.get("kind", NUMERIC),
                coefficient=v.get("coefficient"),
                mean_points=v.get("mean_points"),
                bins=[
                    ScoreBin(
                        definition=decode_def(b["definition"]),
                        points=int(b["points"]),
                        label=b.get("label", ""),
                        points_unrounded=b.get("points_unrounded"),
                        woe=b.get("woe"),
                        pop_share=b.get("pop_share"),
                        default_rate=b.get("default_rate"),
                        avg_pd=b.get("avg_pd"),
                    )
                    for b in v["bins"]
                ],
            )
            for v in doc["variables"]
        ]
        s = doc["scaling"]
        card = cls(
            scaling=PointsScaling(s["base_score"], s["base_odds"], s["pdo"]),
            intercept_points=int(doc["intercept_points"]),
            variables=variables,
            intercept_unrounded=doc.get("intercept_unrounded"),
            population=doc.get("population", {}),
            metadata=doc.get("metadata", {}),
        )
        for v in card.variables:
            if v.mean_points is None:
                v.mean_points = v.mean_points_from_shares()
        return card

    def dumps(self, **kwargs) -> str:
        return json.dumps(self.to_json(), sort_keys=True, **kwargs)

    @classmethod
    def loads(cls, text: str) -> "Scorecard":
        return cls.from_json(json.loads(text))


def scale_to_points(
    fit: LogisticFit,
    table: WoeTable,
    scaling: PointsScaling = PointsScaling(),
    train: Dataset | None = None,
) -> Scorecard:
    """Turn a fitted WOE logistic model into an integer points card.

    The whole offset - factor*beta_0 remainder stays in the intercept row.
    When the training dataset is supplied, per-bin average predicted PD and
    population stats are filled in from it.
    """
    if not fit.converged and not fit.separation:
        raise ConfigError("cannot scale an unconverged fit")
    factor, offset = scaling.factor, scaling.offset
    names = [c for c in fit.coefficients.index if c != "intercept"]

    avg_pd_by_var: dict[str, np.ndarray] = {}
    population: dict = {}
    if train is not None:
        woe_df = table.transform(train.df)
        p = fit.predict(woe_df)
        population = {
            "pop_share": 1.0,
            "default_rate": float(train.y.mean()),
            "avg_pd": float(p.mean()),
        }
        for name in names:
            scheme = table.schemes[name]
            idx = bin_indices(scheme, train.df[name].to_numpy())
            sums = np.bincount(idx, weights=p, minlength=len(scheme.bins))
            counts = np.bincount(idx, minlength=len(scheme.bins))
            with np.errstate(invalid="ignore"):
                avg_pd_by_var[name] = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)

    variables = []
    for name in names:
        if name not in table.schemes:
            raise ConfigError(f"fitted variable {name!r} has no binning scheme")
        scheme = table.schemes[name]
        beta = float(fit.coefficients[name])
        woe = table.woe_values(name)
        bins = []
        for i, b in enumerate(scheme.bins):
            pu = -factor * beta * float(woe[i])
            avg_pd = avg_pd_by_var.get(name)
            bins.append(
                ScoreBin(
                    definition=b.definition,
                    points=round_half_away(pu),
                    points_unrounded=pu,
                    woe=float(woe[i]),
                    pop_share=b.pop_share,
                    default_rate=b.default_rate,
                    avg_pd=None if avg_pd is None or math.isnan(avg_pd[i]) else float(avg_pd[i]),
                )
            )
        var = ScorecardVariable(name=name, kind=scheme.kind, bins=bins, coefficient=beta)
        var.mean_points = var.mean_points_from_shares()
        variables.append(var)

    iu = offset - factor * fit.intercept
    return Scorecard(
        scaling=scaling,
        intercept_points=round_half_away(iu),
        variables=variables,
        intercept_unrounded=iu,
        population=population,
    )


def score(card: Scorecard, applicant) -> ScoreResult:
    return card.score(applicant)


def score_frame(card: Scorecard, X: pd.DataFrame) -> pd.DataFrame:
    """Batch scoring: the input rows with per-variable points, total and PD appended."""
    pts = card.points_matrix(X)
    out = X.copy()
    for var in card.variable_names:
        out[f"points_{var}"] = pts[var]
    out["total_points"] = pts.sum(axis=1) + card.intercept_points
    out["pd"] = card.predict(X)
    return out


def scorecard_attribution(card: Scorecard, applicant, train_means: dict | None = None) -> dict:
    """Per-variable points deltas against the training averages.

    delta_i = points_i(applicant) - mean_points_i; the deltas sum to
    total(applicant) - mean total score (the intercept cancels).
    """
    result = card.score(applicant)
    deltas = {}
    for var in card.variables:
        mean = train_means[var.name] if train_means else var.mean_points
        if mean is None:
            raise DataError(f"no training mean points for {var.name!r}")
        deltas[var.name] = result.per_variable_points[var.name] - mean
    return {
        "deltas": deltas,
        "total_points": result.total_points,
        "mean_total": card.intercept_points
        + float(sum(train_means[v.name] if train_means else v.mean_points for v in card.variables)),
    }


# ---------------------------------------------------------------------------
# end-to-end estimator


class ScorecardModel(BaseEstimator):
    """Bin -> WOE -> MIV forward selection -> IRLS logistic -> points, as one estimator.

    ``predict`` returns the probability of default per row (computed from
    the unrounded card, i.e. exactly the logistic model's probability);
    ``predict_proba`` exposes the usual two-column sklearn layout.
    """

    name = "scorecard"

    def __init__(
        self,
        schema=None,
        scaling: PointsScaling = PointsScaling(),
        min_rel_iv_gain: float = 0.05,
        rare_threshold: float = 0.02,
        alpha: float = 0.1,
        min_bin_frac: float = 0.01,
        min_miv: float = 0.01,
    ):
        self.schema = schema
        self.scaling = scaling
        self.min_rel_iv_gain = min_rel_iv_gain
        self.rare_threshold = rare_threshold
        self.alpha = alpha
        self.min_bin_frac = min_bin_frac
        self.min_miv = min_miv

    def fit(self, X: pd.DataFrame, y):
        check_frame(X)
        transformer = WoeTransformer(
            schema=self.schema,
            min_rel_iv_gain=self.min_rel_iv_gain,
            rare_threshold=self.rare_threshold,
            alpha=self.alpha,
            min_bin_frac=self.min_bin_frac,
        ).fit(X, y)
        woe_df = transformer.transform(X)

        usable = [
            s.variable for s in transformer.schemes_ if woe_df[s.variable].nunique() > 1
        ]
        if not usable:
            raise DataError("no variable produced more than one bin")
        selection = forward_select_miv(woe_df[usable], y, min_miv=self.min_miv)
        if not selection.selected:
            raise DataError(f"no variable reached the minimum MIV of {self.min_miv}")

        specs = self.schema or [ColumnSpec(str(c), NUMERIC) for c in X.columns]
        specs = [s for s in specs if s.name in X.columns]
        df = X.copy()
        df["_target_"] = np.asarray(y, dtype=int)
        train_ds = Dataset(df, specs, "_target_")

        self.transformer_ = transformer
        self.selection_ = selection
        self.fit_ = selection.fit
        self.card_ = scale_to_points(
            selection.fit, transformer.table_, self.scaling, train=train_ds
        )
        self.feature_names_ = list(selection.selected)
        return self

    @property
    def feature_names(self) -> list[str]:
        check_fitted(self, "card_")
        return self.feature_names_

    @property
    def card(self) -> Scorecard:
        check_fitted(self, "card_")
        return self.card_

    def predict(self, X: pd.DataFrame) -> np.ndarray:
        check_fitted(self, "card_")
        return self.card_.predict(check_frame(X, self.feature_names_))

    def predict_proba(self, X: pd.DataFrame) -> np.ndarray:
        p = self.predict(X)
        return np.column_stack([1 - p, p])


class ScorecardPredictor:
    """Prediction-contract adapter around a bare card (e.g. one loaded from JSON)."""

    def __init__(self, card: Scorecard, name: str = "scorecard"):
        self.card = card
        self.name = name
        self.feature_names = card.variable_names

    def predict(self, X: pd.DataFrame) -> np.ndarray:
        return self.card.predict(check_frame(X, self.feature_names))


class PointsModel:
    """The card's rounded total-points function under the prediction contract.

    Useful for explaining the card on the scale it is published in: the
    response is an integer score, not a probability.
    """

    def __init__(self, card: Scorecard, name: str = "scorecard-points"):
        self.card = card
        self.name = name
        self.feature_names = card.variable_names

    def predict(self, X: pd.DataFrame) -> np.ndarray:
        return self.card.total_points(check_frame(X, self.feature_names)).astype(float)
