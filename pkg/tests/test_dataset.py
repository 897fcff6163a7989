import numpy as np
import pandas as pd
import pytest

from crediscope import ColumnSpec, Dataset, SplitConfig, derive_special_dummies, load_csv, split
from crediscope.dataset import enrich_record, schema_from_json, schema_to_json
from crediscope.validation import ConfigError, DataError


def write_csv(path, text):
    path.write_text(text)
    return path


def test_load_csv_minimal(tmp_path):
    path = write_csv(tmp_path / "d.csv", "x,y\n1.5,0\n2.5,1\n")
    ds = load_csv(path, [ColumnSpec("x")], target="y")
    assert ds.n == 2
    assert ds.feature_names == ["x"]
    assert list(ds.y) == [0, 1]


def test_load_csv_non_binary_target(tmp_path):
    path = write_csv(tmp_path / "d.csv", "x,y\n1,0\n2,1\n3,2\n")
    with pytest.raises(DataError, match="non-binary target"):
        load_csv(path, [ColumnSpec("x")], target="y")


def test_load_csv_missing_target(tmp_path):
    path = write_csv(tmp_path / "d.csv", "x,z\n1,0\n")
    with pytest.raises(DataError, match="missing target"):
        load_csv(path, [ColumnSpec("x")], target="y")


def test_load_csv_unparseable_cell_reports_row_and_column(tmp_path):
    path = write_csv(tmp_path / "d.csv", "x,y\n1,0\noops,1\n")
    with pytest.raises(DataError, match=r"row 1, column 'x'"):
        load_csv(path, [ColumnSpec("x")], target="y")


def test_load_csv_empty_categorical_cell(tmp_path):
    path = write_csv(tmp_path / "d.csv", "c,y\nA,0\n,1\n")
    with pytest.raises(DataError, match=r"row 1, column 'c': empty cell"):
        load_csv(path, [ColumnSpec("c", "categorical")], target="y")


def test_load_csv_duplicate_columns(tmp_path):
    path = write_csv(tmp_path / "d.csv", "x,x,y\n1,2,0\n3,4,1\n")
    with pytest.raises(DataError, match="duplicate column names"):
        load_csv(path, [ColumnSpec("x")], target="y")


def test_load_csv_missing_file():
    with pytest.raises(ConfigError, match="no such file"):
        load_csv("nowhere.csv", [ColumnSpec("x")], target="y")


def test_dataset_requires_both_classes():
    df = pd.DataFrame({"x": [1.0, 2.0], "y": [1, 1]})
    with pytest.raises(DataError, match="both classes"):
        Dataset(df, [ColumnSpec("x")], "y")


def test_dataset_rejects_nan():
    df = pd.DataFrame({"x": [1.0, np.nan], "y": [0, 1]})
    with pytest.raises(DataError, match="no value at row 1"):
        Dataset(df, [ColumnSpec("x")], "y")


def test_special_dummy_indicator_values():
    # hand evaluation: values (-9, 5, 7, -9) with code -9 -> indicator (1, 0, 0, 1)
    df = pd.DataFrame({"v": [-9.0, 5.0, 7.0, -9.0], "y": [0, 1, 0, 1]})
    ds = Dataset(df, [ColumnSpec("v", special_codes={-9.0})], "y")
    out = derive_special_dummies(ds)
    assert list(out.df["NoValidv"]) == [1, 0, 0, 1]
    # source column keeps the sentinel values
    assert list(out.df["v"]) == [-9.0, 5.0, 7.0, -9.0]


def test_special_dummies_noop_without_specials():
    df = pd.DataFrame({"v": [1.0, 2.0], "y": [0, 1]})
    ds = Dataset(df, [ColumnSpec("v", special_codes={-9.0})], "y")
    out = derive_special_dummies(ds)
    assert [c.name for c in out.schema] == ["v"]


def test_special_dummies_idempotent(heloc):
    once = heloc["full"]
    twice = derive_special_dummies(once)
    assert [c.name for c in twice.schema] == [c.name for c in once.schema]


def test_special_dummies_rowwise_indicator(heloc):
    ds = heloc["full"]
    for spec in ds.schema:
        if not spec.name.startswith("NoValid"):
            continue
        src = spec.name[len("NoValid"):]
        codes = ds.column_spec(src).special_codes
        expected = ds.df[src].isin(list(codes)).astype(int)
        assert (ds.df[spec.name] == expected).all()


def test_heloc_sample_derives_eleven_dummies():
    from crediscope.datagen import make_heloc_like

    df, schema, target = make_heloc_like(n=500, seed=2)
    ds = derive_special_dummies(Dataset(df, schema, target))
    dummies = [c.name for c in ds.schema if c.name.startswith("NoValid")]
    assert len(dummies) == 11


def test_split_reproduces_published_sizes():
    # 75% of 10459 rows -> 7844 / 2615
    df = pd.DataFrame({"x": np.arange(10459.0), "y": np.tile([0, 1], 10460)[:10459]})
    ds = Dataset(df, [ColumnSpec("x")], "y")
    train, test = split(ds, SplitConfig(0.75, 0))
    assert (train.n, test.n) == (7844, 2615)


def test_split_deterministic_and_partitioning():
    df = pd.DataFrame({"x": np.arange(8.0), "y": [0, 1] * 4})
    ds = Dataset(df, [ColumnSpec("x")], "y")
    a1, b1 = split(ds, SplitConfig(0.5, 3))
    a2, b2 = split(ds, SplitConfig(0.5, 3))
    assert a1.df.equals(a2.df) and b1.df.equals(b2.df)
    assert a1.n == b1.n == 4
    merged = sorted(a1.df["x"].tolist() + b1.df["x"].tolist())
    assert merged == sorted(df["x"].tolist())
    assert not set(a1.df["x"]) & set(b1.df["x"])


def test_split_rejects_empty_partition():
    df = pd.DataFrame({"x": [1.0, 2.0, 3.0], "y": [0, 1, 0]})
    ds = Dataset(df, [ColumnSpec("x")], "y")
    with pytest.raises(ConfigError, match="empty partition"):
        split(ds, SplitConfig(0.99, 0))


def test_split_config_validation():
    with pytest.raises(ConfigError):
        SplitConfig(0.0, 1)
    with pytest.raises(ConfigError):
        SplitConfig(1.0, 1)


def test_to_csv_appends_derived_after_originals(tmp_path):
    df = pd.DataFrame({"v": [-9.0, 4.0], "y": [0, 1]})
    ds = derive_special_dummies(Dataset(df, [ColumnSpec("v", special_codes={-9.0})], "y"))
    out = tmp_path / "round.csv"
    ds.to_csv(out)
    header = out.read_text().splitlines()[0]
    assert header == "v,y,NoValidv" or header == "v,NoValidv,y"


def test_schema_json_roundtrip():
    schema = [ColumnSpec("a", "numeric", frozenset({-9.0})), ColumnSpec("b", "categorical")]
    doc = schema_to_json(schema, "y")
    back, target = schema_from_json(doc)
    assert target == "y"
    assert back[0].special_codes == frozenset({-9.0})
    assert back[1].kind == "categorical"


def test_enrich_record_fills_derivable_indicator():
    schema = [
        ColumnSpec("v", special_codes={-9.0}),
        ColumnSpec("NoValidv"),
    ]
    assert enrich_record({"v": -9.0}, schema)["NoValidv"] == 1
    assert enrich_record({"v": 4.0}, schema)["NoValidv"] == 0
    # explicit values are never overridden
    assert enrich_record({"v": -9.0, "NoValidv": 0}, schema)["NoValidv"] == 0
