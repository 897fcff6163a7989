"""Coarse classing of predictor variables.

Numeric variables are cut by recursive binary splits that greedily maximise
the whole-variable information value, stopping once the best available cut
no longer improves IV by a minimum relative amount. Categorical variables
get rare levels pooled into a ``rest`` level, then adjacent levels (sorted
by default rate) merged while a 2x2 chi-square test cannot tell them apart.
Declared special codes are isolated into bins of their own before any of
this happens.

Bins with an empty class cell get 0.5 added to both class counts before
WOE/IV evaluation (flagged on the scheme); distributions are normalised by
the guarded totals so they still sum to one.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2

from .dataset import CATEGORICAL, NUMERIC, Dataset
from .validation import ConfigError, DataError

REST_LABEL = "rest"


# ---------------------------------------------------------------------------
# bin definitions


@dataclass(frozen=True)
class Interval:
    """Half-open numeric interval (lo, hi]; None stands for the infinite end."""

    lo: float | None
    hi: float | None

    def contains(self, v: float) -> bool:
        lo = -math.inf if self.lo is None else self.lo
        hi = math.inf if self.hi is None else self.hi
        return lo < v <= hi

    def label(self) -> str:
        lo = "-Inf" if self.lo is None else f"{self.lo:g}"
        hi = "Inf" if self.hi is None else f"{self.hi:g}"
        return f"({lo},{hi}]"


@dataclass(frozen=True)
class LevelSet:
    levels: tuple[str, ...]
    rest: bool = False  # absorbs unseen levels when True

    def contains(self, v) -> bool:
        return canonical_level(v) in self.levels

    def label(self) -> str:
        body = ", ".join(self.levels) if self.levels else ""
        return f"{REST_LABEL}({body})" if self.rest else body


@dataclass(frozen=True)
class SpecialCodes:
    codes: tuple[float, ...]

    def contains(self, v) -> bool:
        try:
            return float(v) in self.codes
        except (TypeError, ValueError):
            return False

    def label(self) -> str:
        return "special:" + ",".join(f"{c:g}" for c in self.codes)


def canonical_level(v) -> str:
    """Stable string form of a categorical value.

    Number-like values (including strings such as "5.0") collapse to one
    spelling so that 5, 5.0 and "5" name the same level; everything else
    keeps its string form.
    """
    try:
        f = float(v)
    except (TypeError, ValueError):
        return str(v)
    if math.isfinite(f) and f == int(f):
        return str(int(f))
    return f"{f:g}"


@dataclass
class Bin:
    definition: Interval | LevelSet | SpecialCodes
    n_total: int
    n_bad: int
    pop_share: float = 0.0
    default_rate: float = 0.0
    woe: float = 0.0
    points: int | None = None

    @property
    def n_good(self) -> int:
        return self.n_total - self.n_bad

    @property
    def is_special(self) -> bool:
        return isinstance(self.definition, SpecialCodes)

    def label(self) -> str:
        return self.definition.label()


def guarded_distributions(n_bad, n_good):
    """Per-bin bad/good shares with the 0.5 zero-cell guard.

    Returns (f_bad, f_good, guard_applied); both share vectors sum to 1.
    """
    n_bad = np.asarray(n_bad, dtype=float)
    n_good = np.asarray(n_good, dtype=float)
    zero = (n_bad == 0) | (n_good == 0)
    gb = n_bad + 0.5 * zero
    gg = n_good + 0.5 * zero
    return gb / gb.sum(), gg / gg.sum(), bool(zero.any())


def woe_iv_from_counts(n_bad, n_good):
    """(woe array, total IV, guard flag) for one scheme's bins."""
    f1, f0, guarded = guarded_distributions(n_bad, n_good)
    woe = np.log(f1 / f0)
    iv = float(np.sum((f1 - f0) * woe))
    return woe, iv, guarded


@dataclass
class BinningScheme:
    """Ordered bins of one variable with counts, WOE and IV."""

    variable: str
    kind: str
    bins: list[Bin]
    iv: float = 0.0
    monotone_constraint: str = "none"
    woe_guard_applied: bool = False
    edit_log: list[dict] = field(default_factory=list)

    def recompute(self) -> "BinningScheme":
        """Refresh pop_share/default_rate/WOE/IV from the raw bin counts."""
        n_bad = np.array([b.n_bad for b in self.bins], dtype=float)
        n_good = np.array([b.n_good for b in self.bins], dtype=float)
        total = float(n_bad.sum() + n_good.sum())
        woe, iv, guarded = woe_iv_from_counts(n_bad, n_good)
        for i, b in enumerate(self.bins):
            b.woe = float(woe[i])
            b.pop_share = b.n_total / total if total else 0.0
            b.default_rate = b.n_bad / b.n_total if b.n_total else 0.0
        self.iv = iv
        self.woe_guard_applied = guarded
        return self

    def bin_index(self, value) -> int:
        """Index of the bin covering ``value``; raises DataError when uncovered."""
        for i, b in enumerate(self.bins):
            if b.is_special and b.definition.contains(value):
                return i
        if self.kind == NUMERIC:
            v = float(value)
            for i, b in enumerate(self.bins):
                if not b.is_special and b.definition.contains(v):
                    return i
        else:
            for i, b in enumerate(self.bins):
                if not b.is_special and b.definition.contains(value):
                    return i
            for i, b in enumerate(self.bins):
                if isinstance(b.definition, LevelSet) and b.definition.rest:
                    return i
        raise DataError(f"uncovered value {value!r} for variable {self.variable!r}")

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        def encode_def(d):
            if isinstance(d, Interval):
                return {"type": "interval", "lo": d.lo, "hi": d.hi}
            if isinstance(d, LevelSet):
                return {"type": "levels", "levels": list(d.levels), "rest": d.rest}
            return {"type": "special", "codes": list(d.codes)}

        return {
            "variable": self.variable,
            "kind": self.kind,
            "monotone_constraint": self.monotone_constraint,
            "iv": self.iv,
            "woe_guard_applied": self.woe_guard_applied,
            "bins": [
                {
                    "definition": encode_def(b.definition),
                    "label": b.label(),
                    "n_total": b.n_total,
                    "n_bad": b.n_bad,
                    "pop_share": b.pop_share,
                    "default_rate": b.default_rate,
                    "woe": b.woe,
                    "points": b.points,
                }
                for b in self.bins
            ],
            "edit_log": self.edit_log,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "BinningScheme":
        def decode_def(d):
            if d["type"] == "interval":
                return Interval(d["lo"], d["hi"])
            if d["type"] == "levels":
                return LevelSet(tuple(d["levels"]), d.get("rest", False))
            if d["type"] == "special":
                return SpecialCodes(tuple(d["codes"]))
            raise DataError(f"unknown bin definition type {d['type']!r}")

        bins = [
            Bin(
                definition=decode_def(b["definition"]),
                n_total=b["n_total"],
                n_bad=b["n_bad"],
                pop_share=b["pop_share"],
                default_rate=b["default_rate"],
                woe=b["woe"],
                points=b.get("points"),
            )
            for b in doc["bins"]
        ]
        return cls(
            variable=doc["variable"],
            kind=doc["kind"],
            bins=bins,
            iv=doc["iv"],
            monotone_constraint=doc.get("monotone_constraint", "none"),
            woe_guard_applied=doc.get("woe_guard_applied", False),
            edit_log=list(doc.get("edit_log", ())),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "BinningScheme":
        return cls.from_json(json.loads(text))


# ---------------------------------------------------------------------------
# numeric auto binning


def _special_partition(x: np.ndarray, y: np.ndarray, codes) -> tuple[list[Bin], np.ndarray]:
    """Split off special-coded rows into singleton bins (sorted by code)."""
    specials: list[Bin] = []
    mask = np.zeros(len(x), dtype=bool)
    for code in sorted(codes):
        hit = x == code
        if hit.any():
            specials.append(
                Bin(SpecialCodes((float(code),)), int(hit.sum()), int(y[hit].sum()))
            )
            mask |= hit
    return specials, ~mask


def _scheme_iv(fixed_bad, fixed_good, seg_bad, seg_good) -> float:
    bad = np.concatenate([fixed_bad, seg_bad])
    good = np.concatenate([fixed_good, seg_good])
    _, iv, _ = woe_iv_from_counts(bad, good)
    return iv


def auto_bin_numeric(
    ds: Dataset,
    var: str,
    min_rel_iv_gain: float = 0.05,
    special_codes=None,
    min_bin_frac: float = 0.01,
    monotone_constraint: str = "none",
) -> BinningScheme:
    """Recursive IV-maximising binary splits of a numeric variable.

    At every step the single cut (a midpoint between consecutive observed
    values, anywhere in the current scheme) that maximises total IV is
    taken, provided the relative IV improvement reaches ``min_rel_iv_gain``
    and both children keep at least ``min_bin_frac`` of the non-special rows.
    Ties go to the smallest cut value.
    """
    spec = ds.column_spec(var)
    if spec.kind != NUMERIC:
        raise ConfigError(f"{var!r} is not numeric")
    if min_rel_iv_gain <= 0:
        raise ConfigError("min_rel_iv_gain must be positive")
    codes = set(spec.special_codes if special_codes is None else special_codes)
    x = ds.df[var].to_numpy(dtype=float)
    y = ds.y

    special_bins, keep = _special_partition(x, y, codes)
    xs, ys = x[keep], y[keep]

    if len(xs) == 0:
        scheme = BinningScheme(var, NUMERIC, special_bins, monotone_constraint=monotone_constraint)
        return scheme.recompute()

    values, inverse = np.unique(xs, return_inverse=True)
    bad_v = np.bincount(inverse, weights=ys, minlength=len(values))
    good_v = np.bincount(inverse, weights=1 - ys, minlength=len(values))

    fixed_bad = np.array([b.n_bad for b in special_bins], dtype=float)
    fixed_good = np.array([b.n_good for b in special_bins], dtype=float)
    min_count = max(1, math.ceil(min_bin_frac * len(xs)))

    # segments are [start, end) ranges over the distinct-value axis
    segments: list[tuple[int, int]] = [(0, len(values))]
    while True:
        seg_bad = np.array([bad_v[a:b].sum() for a, b in segments])
        seg_good = np.array([good_v[a:b].sum() for a, b in segments])
        iv_before = _scheme_iv(fixed_bad, fixed_good, seg_bad, seg_good)

        best = None  # (iv_after, cut_value, seg_index, split_pos)
        for si, (a, b) in enumerate(segments):
            if b - a < 2:
                continue
            cb = np.cumsum(bad_v[a:b])[:-1]
            cg = np.cumsum(good_v[a:b])[:-1]
            ln = cb + cg
            rn = (seg_bad[si] + seg_good[si]) - ln
            ok = (ln >= min_count) & (rn >= min_count)
            if not ok.any():
                continue
            lb, lg = cb[ok], cg[ok]
            rb, rg = seg_bad[si] - lb, seg_good[si] - lg

            other_bad = np.concatenate([fixed_bad, np.delete(seg_bad, si)])
            other_good = np.concatenate([fixed_good, np.delete(seg_good, si)])
            zl = (lb == 0) | (lg == 0)
            zr = (rb == 0) | (rg == 0)
            zo = (other_bad == 0) | (other_good == 0)
            glb, glg = lb + 0.5 * zl, lg + 0.5 * zl
            grb, grg = rb + 0.5 * zr, rg + 0.5 * zr
            gob, gog = other_bad + 0.5 * zo, other_good + 0.5 * zo

            sum_bad = gob.sum() + glb + grb
            sum_good = gog.sum() + glg + grg

            def term(nb, ng):
                f1 = nb / sum_bad
                f0 = ng / sum_good
                return (f1 - f0) * np.log(f1 / f0)

            iv_after = term(glb, glg) + term(grb, grg)
            if len(gob):
                iv_after = iv_after + term(gob[:, None], gog[:, None]).sum(axis=0)

            cut_pos = np.nonzero(ok)[0]
            cuts = (values[a + cut_pos] + values[a + cut_pos + 1]) / 2.0
            for k in range(len(cut_pos)):
                cand = (float(iv_after[k]), float(cuts[k]), si, int(cut_pos[k]) + 1)
                if (
                    best is None
                    or cand[0] > best[0]
                    or (cand[0] == best[0] and cand[1] < best[1])
                ):
                    best = cand

        if best is None:
            break
        iv_after, _cut, si, pos = best
        if iv_before == 0.0:
            accept = iv_after > 0.0
        else:
            accept = (iv_after - iv_before) / iv_before >= min_rel_iv_gain
        if not accept:
            break
        a, b = segments[si]
        segments[si : si + 1] = [(a, a + pos), (a + pos, b)]
        segments.sort()

    interval_bins = []
    for i, (a, b) in enumerate(segments):
        lo = None if i == 0 else float((values[a - 1] + values[a]) / 2.0)
        hi = None if i == len(segments) - 1 else float((values[b - 1] + values[b]) / 2.0)
        interval_bins.append(
            Bin(Interval(lo, hi), int(bad_v[a:b].sum() + good_v[a:b].sum()), int(bad_v[a:b].sum()))
        )

    scheme = BinningScheme(
        var, NUMERIC, special_bins + interval_bins, monotone_constraint=monotone_constraint
    )
    return scheme.recompute()


# ---------------------------------------------------------------------------
# categorical auto binning


def chi2_2x2(bad_a: float, good_a: float, bad_b: float, good_b: float) -> float:
    """Pearson chi-square of a 2x2 bad/good table, no continuity correction.

    Degenerate margins (a class absent from both bins) give 0, i.e. the
    bins are indistinguishable.
    """
    n = bad_a + good_a + bad_b + good_b
    col_bad = bad_a + bad_b
    col_good = good_a + good_b
    row_a = bad_a + good_a
    row_b = bad_b + good_b
    if col_bad == 0 or col_good == 0 or row_a == 0 or row_b == 0:
        return 0.0
    det = bad_a * good_b - good_a * bad_b
    return float(n * det * det / (row_a * row_b * col_bad * col_good))


def auto_bin_categorical(
    ds: Dataset,
    var: str,
    rare_threshold: float = 0.02,
    alpha: float = 0.1,
    special_codes=None,
) -> BinningScheme:
    """Pool rare levels into ``rest`` and chi-square-merge adjacent levels.

    Levels below ``rare_threshold`` population share form the rest level.
    The surviving level bins (rest included) are sorted by default rate and
    each adjacent pair is merged while the 2x2 chi-square statistic stays
    under the df=1 critical value at ``alpha``; passes repeat until stable.
    """
    spec = ds.column_spec(var)
    if spec.kind != CATEGORICAL:
        raise ConfigError(f"{var!r} is not categorical")
    codes = set(spec.special_codes if special_codes is None else special_codes)
    raw = ds.df[var].to_numpy()
    y = ds.y
    n_all = len(raw)

    canon_codes = {canonical_level(c) for c in codes}
    levels = np.array([canonical_level(v) for v in raw])
    special_bins = []
    special_mask = np.zeros(n_all, dtype=bool)
    for code in sorted(codes, key=canonical_level):
        hit = levels == canonical_level(code)
        if hit.any():
            try:
                code_val = float(code)
            except (TypeError, ValueError):
                code_val = math.nan
            special_bins.append(
                Bin(SpecialCodes((code_val,)), int(hit.sum()), int(y[hit].sum()))
            )
            special_mask |= hit

    keep = ~special_mask
    lev, inverse = np.unique(levels[keep], return_inverse=True)
    bad = np.bincount(inverse, weights=y[keep], minlength=len(lev))
    good = np.bincount(inverse, weights=1 - y[keep], minlength=len(lev))
    total = bad + good

    groups: list[dict] = []
    rare_idx = [i for i in range(len(lev)) if total[i] / n_all < rare_threshold]
    kept_idx = [i for i in range(len(lev)) if i not in rare_idx]
    for i in kept_idx:
        groups.append({"levels": [lev[i]], "bad": bad[i], "good": good[i], "rest": False})
    if rare_idx:
        groups.append(
            {
                "levels": [lev[i] for i in rare_idx],
                "bad": float(bad[rare_idx].sum()),
                "good": float(good[rare_idx].sum()),
                "rest": True,
            }
        )

    def rate(g):
        t = g["bad"] + g["good"]
        return g["bad"] / t if t else 0.0

    groups.sort(key=lambda g: (rate(g), g["levels"][0]))
    crit = float(chi2.isf(alpha, df=1))

    merged_any = True
    while merged_any and len(groups) > 1:
        merged_any = False
        i = 0
        while i < len(groups) - 1:
            a, b = groups[i], groups[i + 1]
            if chi2_2x2(a["bad"], a["good"], b["bad"], b["good"]) < crit:
                a["levels"] = sorted(a["levels"] + b["levels"])
                a["bad"] += b["bad"]
                a["good"] += b["good"]
                a["rest"] = a["rest"] or b["rest"]
                del groups[i + 1]
                merged_any = True
            else:
                i += 1

    cat_bins = [
        Bin(
            LevelSet(tuple(sorted(g["levels"])), rest=g["rest"]),
            int(g["bad"] + g["good"]),
            int(g["bad"]),
        )
        for g in groups
    ]
    scheme = BinningScheme(var, CATEGORICAL, special_bins + cat_bins)
    return scheme.recompute()


# ---------------------------------------------------------------------------
# manual repair and checks


def merge_bins(scheme: BinningScheme, i: int, j: int) -> BinningScheme:
    """Fuse two adjacent bins into one; returns a new scheme, logs the edit."""
    nb = len(scheme.bins)
    if not (0 <= i < nb and 0 <= j < nb):
        raise ConfigError(f"bin index out of range: ({i}, {j}) with {nb} bins")
    if abs(i - j) != 1:
        raise ConfigError(f"bins {i} and {j} are not adjacent")
    i, j = min(i, j), max(i, j)
    a, b = scheme.bins[i], scheme.bins[j]
    if a.is_special != b.is_special:
        raise ConfigError("cannot merge a special-code bin with an ordinary bin")

    if isinstance(a.definition, Interval):
        definition = Interval(a.definition.lo, b.definition.hi)
    elif isinstance(a.definition, LevelSet):
        definition = LevelSet(
            tuple(sorted(set(a.definition.levels) | set(b.definition.levels))),
            rest=a.definition.rest or b.definition.rest,
        )
    else:
        definition = SpecialCodes(tuple(sorted(set(a.definition.codes) | set(b.definition.codes))))

    fused = Bin(definition, a.n_total + b.n_total, a.n_bad + b.n_bad)
    out = copy.deepcopy(scheme)
    out.bins[i : j + 1] = [fused]
    out.edit_log = scheme.edit_log + [
        {
            "action": "merge",
            "indices": [i, j],
            "merged": [a.label(), b.label()],
            "result": fused.label(),
        }
    ]
    return out.recompute()


@dataclass(frozen=True)
class MonotonicityViolation:
    index_a: int
    index_b: int
    rate_a: float
    rate_b: float


def check_monotonicity(scheme: BinningScheme) -> list[MonotonicityViolation]:
    """List adjacent ordinary-bin pairs breaking the declared rate direction.

    Special-code bins have no natural position on the variable's axis and are
    skipped. Equal rates never violate.
    """
    if scheme.monotone_constraint == "none":
        raise ConfigError(f"{scheme.variable!r}: no constraint declared")
    if scheme.monotone_constraint not in ("increasing", "decreasing"):
        raise ConfigError(f"unknown constraint {scheme.monotone_constraint!r}")
    ordinary = [(i, b) for i, b in enumerate(scheme.bins) if not b.is_special]
    out = []
    for (ia, a), (ib, b) in zip(ordinary, ordinary[1:]):
        bad = (
            b.default_rate < a.default_rate
            if scheme.monotone_constraint == "increasing"
            else b.default_rate > a.default_rate
        )
        if bad:
            out.append(MonotonicityViolation(ia, ib, a.default_rate, b.default_rate))
    return out
