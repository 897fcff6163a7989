import math

import numpy as np
import pandas as pd
import pytest

from crediscope import (
    Bin,
    BinningScheme,
    ColumnSpec,
    Dataset,
    WoeTransformer,
    auto_bin_categorical,
    auto_bin_numeric,
    information_value,
    woe_transform,
)
from crediscope.binning import Interval, LevelSet
from crediscope.validation import DataError

from .oracles import woe_iv_by_counting


def scheme_from_counts(pairs):
    bins = []
    lo = None
    for i, (n_bad, n_good) in enumerate(pairs):
        hi = None if i == len(pairs) - 1 else float(i + 1)
        bins.append(Bin(Interval(lo, hi), n_bad + n_good, n_bad))
        lo = hi
    return BinningScheme("x", "numeric", bins).recompute()


def test_woe_of_double_density_bin_is_ln2():
    # f(bin|1)=0.2, f(bin|0)=0.1: 2 of 10 bads vs 1 of 10 goods
    scheme = scheme_from_counts([(2, 1), (8, 9)])
    assert scheme.bins[0].woe == pytest.approx(math.log(2.0), abs=1e-12)


def test_woe_zero_for_equal_densities():
    scheme = scheme_from_counts([(5, 5), (5, 5)])
    assert scheme.bins[0].woe == 0.0


def test_iv_example_value():
    # f(.|1)=(0.8,0.2), f(.|0)=(0.2,0.8) -> IV = 1.2*ln4 = 1.6635532...
    scheme = scheme_from_counts([(8, 2), (2, 8)])
    assert information_value(scheme) == pytest.approx(1.2 * math.log(4.0), abs=1e-12)


def test_iv_zero_for_identical_distributions():
    assert information_value(scheme_from_counts([(4, 4), (6, 6)])) == 0.0


def test_iv_single_bin_zero():
    assert information_value(scheme_from_counts([(7, 13)])) == 0.0


def test_distributions_sum_to_one_with_guard():
    from crediscope.woe import WoeTable

    scheme = scheme_from_counts([(3, 0), (7, 10)])  # zero cell triggers the guard
    table = WoeTable([scheme])
    assert table.f_bad["x"].sum() == pytest.approx(1.0, abs=1e-12)
    assert table.f_good["x"].sum() == pytest.approx(1.0, abs=1e-12)
    assert scheme.woe_guard_applied


def test_two_path_iv_equality():
    rng = np.random.default_rng(7)
    x = rng.integers(0, 9, 120).astype(float)
    y = rng.integers(0, 2, 120)
    if y.min() == y.max():
        y[0] ^= 1
    ds = Dataset(pd.DataFrame({"x": x, "y": y}), [ColumnSpec("x")], "y")
    scheme = auto_bin_numeric(ds, "x", min_rel_iv_gain=0.01)
    encoded, table = woe_transform(ds, [scheme])
    direct = information_value(scheme)
    via_column = information_value(encoded.df["x"].to_numpy(), ds.y)
    assert via_column == pytest.approx(direct, abs=1e-12)


def test_transform_uses_training_woe_on_new_rows():
    ds = Dataset(
        pd.DataFrame({"x": [1.0, 2.0, 3.0, 4.0], "y": [0, 0, 1, 1]}),
        [ColumnSpec("x")],
        "y",
    )
    scheme = auto_bin_numeric(ds, "x", min_rel_iv_gain=0.01)
    _, table = woe_transform(ds, [scheme])
    woes = {b.label(): b.woe for b in scheme.bins}
    fresh = pd.DataFrame({"x": [0.5, 99.0]})
    out = table.transform(fresh)
    assert out["x"].iloc[0] == woes[scheme.bins[0].label()]
    assert out["x"].iloc[1] == woes[scheme.bins[-1].label()]


def test_unseen_level_maps_to_rest_or_errors():
    rng = np.random.default_rng(1)
    levels = ["a"] * 120 + ["b"] * 77 + ["q"] * 3  # q sits below the 2% pooling threshold
    y = rng.integers(0, 2, 200)
    ds = Dataset(pd.DataFrame({"c": levels, "y": y}), [ColumnSpec("c", "categorical")], "y")
    scheme = auto_bin_categorical(ds, "c")
    _, table = woe_transform(ds, [scheme])
    rest_idx = next(
        i
        for i, b in enumerate(scheme.bins)
        if isinstance(b.definition, LevelSet) and b.definition.rest
    )
    out = table.transform(pd.DataFrame({"c": ["NEVER-SEEN"]}))
    assert out["c"].iloc[0] == scheme.bins[rest_idx].woe

    # without a rest bin the same lookup must fail
    no_rest = BinningScheme(
        "c",
        "categorical",
        [Bin(LevelSet(("a",)), 10, 4), Bin(LevelSet(("b",)), 10, 6)],
    ).recompute()
    from crediscope.woe import WoeTable

    with pytest.raises(DataError, match="uncovered value"):
        WoeTable([no_rest]).transform(pd.DataFrame({"c": ["zzz"]}))


def test_iv_from_column_requires_target():
    with pytest.raises(DataError):
        information_value(np.array([0.1, 0.2]))


def test_transformer_estimator_roundtrip(heloc):
    train = heloc["train"]
    tf = WoeTransformer(schema=train.schema).fit(train.X, train.y)
    woe_df = tf.transform(train.X)
    assert set(woe_df.columns) == set(train.X.columns)
    for scheme in tf.schemes_:
        assert pd.api.types.is_float_dtype(woe_df[scheme.variable])
    # sklearn param plumbing stays intact
    params = tf.get_params()
    assert params["rare_threshold"] == 0.02
    # declared rate directions travel from the schema into the schemes
    by_var = {s.variable: s for s in tf.schemes_}
    assert by_var["ExternalRiskEstimate"].monotone_constraint == "decreasing"
    assert by_var["NetFractionRevolvingBurden"].monotone_constraint == "increasing"


def test_engine_woe_matches_counting_oracle_random():
    rng = np.random.default_rng(99)
    for _ in range(10):
        n = int(rng.integers(30, 200))
        x = rng.integers(0, 7, n).astype(float)
        y = rng.integers(0, 2, n)
        if y.min() == y.max():
            y[0] ^= 1
        ds = Dataset(pd.DataFrame({"x": x, "y": y}), [ColumnSpec("x")], "y")
        scheme = auto_bin_numeric(ds, "x", min_rel_iv_gain=0.02)
        woes, iv = woe_iv_by_counting([(b.n_bad, b.n_good) for b in scheme.bins])
        for b, w in zip(scheme.bins, woes):
            assert b.woe == pytest.approx(w, abs=1e-12)
        assert scheme.iv == pytest.approx(iv, abs=1e-12)
