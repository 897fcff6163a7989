"""Tabular credit data: typed columns, special-value codes, splits.

A :class:`Dataset` wraps a pandas frame together with an explicit schema
(no type inference) and a binary target column where 1 marks a default
("bad") and 0 a non-default ("good"). Missing observations are expected to
be encoded as declared special codes (e.g. -9 / -8 / -7), never as NaN.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .validation import ConfigError, DataError

NUMERIC = "numeric"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class ColumnSpec:
    """Declared type, sentinel codes and optional rate-direction constraint of one column."""

    name: str
    kind: str = NUMERIC
    special_codes: frozenset = frozenset()
    monotone: str = "none"  # declared default-rate direction along the axis

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise ConfigError(f"column {self.name!r}: unknown kind {self.kind!r}")
        if self.monotone not in ("none", "increasing", "decreasing"):
            raise ConfigError(f"column {self.name!r}: unknown monotone {self.monotone!r}")
        object.__setattr__(self, "special_codes", frozenset(self.special_codes))


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.75
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must be in (0,1), got {self.train_fraction}")


class Dataset:
    """Immutable-by-convention table with schema and binary target.

    Invariants enforced at construction: target values are exactly {0,1}
    with both classes present, column names are unique, every cell holds a
    value (special codes count as values, NaN does not), and n > 0.
    """

    def __init__(self, df: pd.DataFrame, schema: list[ColumnSpec], target: str):
        names = [c.name for c in schema]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise DataError(f"duplicate column names in schema: {dupes}")
        if target not in df.columns:
            raise DataError(f"missing target column {target!r}")
        missing = [n for n in names if n not in df.columns]
        if missing:
            raise DataError(f"schema columns absent from data: {missing}")
        if len(df) == 0:
            raise DataError("dataset has no rows")

        tvals = set(pd.unique(df[target]))
        if not tvals <= {0, 1}:
            raise DataError(f"non-binary target: values {sorted(map(repr, tvals))}")
        if tvals != {0, 1}:
            raise DataError("target must contain both classes 0 and 1")

        cols = names + ([target] if target not in names else [])
        frame = df[cols].reset_index(drop=True)
        for spec in schema:
            col = frame[spec.name]
            if col.isna().any():
                row = int(col.isna().idxmax())
                raise DataError(
                    f"column {spec.name!r} has no value at row {row}; encode "
                    f"missing observations as declared special codes"
                )
        self._df = frame
        self.schema = list(schema)
        self.target = target

    # -- accessors -------------------------------------------------------
    @property
    def df(self) -> pd.DataFrame:
        return self._df

    @property
    def n(self) -> int:
        return len(self._df)

    @property
    def feature_names(self) -> list[str]:
        return [c.name for c in self.schema if c.name != self.target]

    @property
    def X(self) -> pd.DataFrame:
        return self._df[self.feature_names]

    @property
    def y(self) -> np.ndarray:
        return self._df[self.target].to_numpy(dtype=int)

    def column_spec(self, name: str) -> ColumnSpec:
        for spec in self.schema:
            if spec.name == name:
                return spec
        raise KeyError(name)

    def to_csv(self, path) -> None:
        """Write rows back out; derived columns sit after the originals."""
        self._df.to_csv(path, index=False)

    def __repr__(self):
        return f"Dataset(n={self.n}, columns={len(self.schema)}, target={self.target!r})"


def _parse_numeric(raw: str, row: int, col: str, problems: list[str]) -> float:
    text = raw.strip()
    if text == "":
        problems.append(f"row {row}, column {col!r}: empty cell")
        return math.nan
    try:
        return float(text)
    except ValueError:
        problems.append(f"row {row}, column {col!r}: unparseable numeric {raw!r}")
        return math.nan


def load_csv(path, schema: list[ColumnSpec], target: str) -> Dataset:
    """Read a comma-separated file (header row, UTF-8) against an explicit schema.

    Extra file columns are ignored; every schema column and the target must be
    present. All malformed cells are collected and reported together.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such file: {path}")
    by_name = {c.name: c for c in schema}
    if target not in by_name:
        by_name[target] = ColumnSpec(target, NUMERIC)

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise DataError(f"{path}: duplicate column names {dupes}")
        if target not in header:
            raise DataError(f"{path}: missing target column {target!r}")
        absent = [c.name for c in schema if c.name not in header]
        if absent:
            raise DataError(f"{path}: header lacks schema columns {absent}")

        idx = {name: header.index(name) for name in by_name if name in header}
        problems: list[str] = []
        columns: dict[str, list] = {name: [] for name in idx}
        for row_no, row in enumerate(reader):
            if not row:
                continue
            for name, j in idx.items():
                raw = row[j] if j < len(row) else ""
                spec = by_name[name]
                if spec.kind == NUMERIC or name == target:
                    columns[name].append(_parse_numeric(raw, row_no, name, problems))
                else:
                    text = raw.strip()
                    if text == "":
                        problems.append(f"row {row_no}, column {name!r}: empty cell")
                    columns[name].append(text)
        if problems:
            raise DataError(f"{path}: {len(problems)} malformed cells: " + "; ".join(problems[:20]))

    df = pd.DataFrame(columns)
    tcol = df[target]
    if not np.isfinite(tcol).all() or not set(np.unique(tcol)) <= {0.0, 1.0}:
        raise DataError(f"{path}: non-binary target {target!r}")
    df[target] = tcol.astype(int)
    return Dataset(df, schema, target)


def derive_special_dummies(ds: Dataset, threshold: float = 0.0, prefix: str = "NoValid") -> Dataset:
    """Append a 0/1 indicator for numeric columns whose special-code share exceeds ``threshold``.

    The source column keeps its special values (the binning step isolates them);
    the indicator is named ``<prefix><Column>``. Applying the derivation twice
    adds nothing: indicator columns carry no special codes of their own and
    existing indicators are not re-derived.
    """
    df = ds.df.copy()
    schema = list(ds.schema)
    existing = {c.name for c in schema}
    for spec in ds.schema:
        if spec.kind != NUMERIC or not spec.special_codes or spec.name == ds.target:
            continue
        dummy_name = f"{prefix}{spec.name}"
        if dummy_name in existing:
            continue
        codes = np.array(sorted(spec.special_codes), dtype=float)
        flag = np.isin(df[spec.name].to_numpy(dtype=float), codes).astype(int)
        if flag.mean() > threshold:
            df[dummy_name] = flag
            schema.append(ColumnSpec(dummy_name, NUMERIC))
            existing.add(dummy_name)
    return Dataset(df, schema, ds.target)


def split(ds: Dataset, cfg: SplitConfig) -> tuple[Dataset, Dataset]:
    """Deterministic shuffled partition into train/test.

    Train size is train_fraction*n rounded half-away-from-zero (0.75 of
    10459 rows gives 7844). Row order within each part follows the original
    dataset, so identical seeds give bit-identical partitions.
    """
    n = ds.n
    n_train = int(math.floor(cfg.train_fraction * n + 0.5))
    n_test = n - n_train
    if n_train == 0 or n_test == 0:
        raise ConfigError(
            f"train_fraction={cfg.train_fraction} on n={n} leaves an empty partition "
            f"(train={n_train}, test={n_test})"
        )
    rng = np.random.default_rng(cfg.seed)
    perm = rng.permutation(n)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    train = Dataset(ds.df.iloc[train_idx], ds.schema, ds.target)
    test = Dataset(ds.df.iloc[test_idx], ds.schema, ds.target)
    return train, test


def derived_indicator_sources(schema: list[ColumnSpec], prefix: str = "NoValid") -> dict[str, ColumnSpec]:
    """Map indicator columns named ``<prefix><Source>`` back to their source spec.

    Lets consumers recompute the indicator for records that carry only the
    source column (the convention produced by :func:`derive_special_dummies`).
    """
    by_name = {c.name: c for c in schema}
    out = {}
    for spec in schema:
        if spec.name.startswith(prefix):
            src = by_name.get(spec.name[len(prefix):])
            if src is not None and src.kind == NUMERIC and src.special_codes:
                out[spec.name] = src
    return out


def enrich_record(record: dict, schema: list[ColumnSpec], prefix: str = "NoValid") -> dict:
    """Fill missing derivable indicator fields of one applicant record."""
    out = dict(record)
    for dummy, src in derived_indicator_sources(schema, prefix).items():
        if dummy not in out and src.name in out:
            try:
                value = float(out[src.name])
            except (TypeError, ValueError):
                continue
            out[dummy] = int(value in src.special_codes)
    return out


def enrich_frame(df: pd.DataFrame, schema: list[ColumnSpec], prefix: str = "NoValid") -> pd.DataFrame:
    """Column-wise version of :func:`enrich_record` for scoring batches."""
    out = df.copy()
    for dummy, src in derived_indicator_sources(schema, prefix).items():
        if dummy not in out.columns and src.name in out.columns:
            codes = np.array(sorted(src.special_codes), dtype=float)
            out[dummy] = np.isin(out[src.name].to_numpy(dtype=float), codes).astype(int)
    return out


def schema_to_json(schema: list[ColumnSpec], target: str) -> dict:
    columns = []
    for c in schema:
        entry = {"name": c.name, "kind": c.kind, "special_codes": sorted(c.special_codes)}
        if c.monotone != "none":
            entry["monotone"] = c.monotone
        columns.append(entry)
    return {"target": target, "columns": columns}


def schema_from_json(doc: dict) -> tuple[list[ColumnSpec], str]:
    try:
        target = doc["target"]
        cols = [
            ColumnSpec(
                c["name"],
                c.get("kind", NUMERIC),
                frozenset(c.get("special_codes", ())),
                c.get("monotone", "none"),
            )
            for c in doc["columns"]
        ]
    except (KeyError, TypeError) as err:
        raise ConfigError(f"bad schema document: {err}") from err
    return cols, target
