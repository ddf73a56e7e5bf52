"""Tabular ingestion and profiling.

CSV files are parsed RFC-4180 style (comma delimiter, double-quote
escaping, mandatory header). A column is continuous iff every non-missing
cell parses as a finite number; otherwise it is categorical. Missing
cells are the empty field and the literals NA / NaN / null
(case-insensitive). Cells are floats, strings, or None for missing.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DuplicateHeader,
    EmptyFile,
    InvalidHeader,
    RaggedRows,
    TooFewRows,
)

MISSING_TOKENS = frozenset({"", "na", "nan", "null"})
DEFAULT_BINS = 20


class ColumnKind(str, Enum):
    CONTINUOUS = "continuous"
    CATEGORICAL = "categorical"


class MissingPolicy(str, Enum):
    DROP_ROWS = "drop_rows"
    MEAN_IMPUTE = "mean_impute"


@dataclass(frozen=True)
class Column:
    name: str
    kind: ColumnKind
    values: tuple


@dataclass(frozen=True)
class Dataset:
    name: str
    columns: tuple[Column, ...]
    row_count: int

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def continuous_columns(self) -> tuple[Column, ...]:
        return tuple(c for c in self.columns if c.kind is ColumnKind.CONTINUOUS)

    def kinds(self) -> set[ColumnKind]:
        return {c.kind for c in self.columns}

    def has_missing(self) -> bool:
        return any(v is None for c in self.columns for v in c.values)

    def to_matrix(self) -> np.ndarray:
        """Continuous columns as an (n, p) float matrix; requires no missing."""
        cols = self.continuous_columns()
        return np.column_stack([np.asarray(c.values, dtype=float) for c in cols])


@dataclass(frozen=True)
class ColumnProfile:
    name: str
    kind: ColumnKind
    missing_rate: float
    unique_count: int
    mean: float | None = None
    std: float | None = None
    min: float | None = None
    max: float | None = None
    histogram: tuple[tuple[float, float, int], ...] = ()


@dataclass(frozen=True)
class DatasetProfile:
    columns: tuple[ColumnProfile, ...]
    continuous_names: tuple[str, ...]
    correlation: tuple[tuple[float, ...], ...]
    friendliness: int
    friendliness_reasons: tuple[str, ...]
    warnings: tuple[str, ...]

    def column(self, name: str) -> ColumnProfile:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def correlation_between(self, a: str, b: str) -> float | None:
        try:
            i = self.continuous_names.index(a)
            j = self.continuous_names.index(b)
        except ValueError:
            return None
        return self.correlation[i][j]


def _parse_number(raw: str) -> float | None:
    try:
        v = float(raw)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def load_csv(data: bytes, name: str) -> Dataset:
    """Parse CSV bytes into a typed Dataset."""
    text = data.decode("utf-8-sig")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise EmptyFile("no header row")
    header = rows[0]
    if any(h == "" for h in header):
        raise InvalidHeader("empty header field")
    if len(set(header)) != len(header):
        dup = next(h for h in header if header.count(h) > 1)
        raise DuplicateHeader(f"duplicate header field {dup!r}")
    width = len(header)

    raw_rows: list[list[str]] = []
    for idx, row in enumerate(rows[1:], start=1):
        if row == [] and width == 1:
            row = [""]  # a blank line in a one-column file is a missing cell
        if len(row) != width:
            raise RaggedRows(idx, width, len(row))
        raw_rows.append(row)

    columns = []
    for j, col_name in enumerate(header):
        raw = [r[j] for r in raw_rows]
        cells: list = [
            None if c.lower() in MISSING_TOKENS else c for c in raw
        ]
        observed = [c for c in cells if c is not None]
        numeric = [_parse_number(c) for c in observed]
        if observed and all(v is not None for v in numeric):
            it = iter(numeric)
            cells = [None if c is None else next(it) for c in cells]
            kind = ColumnKind.CONTINUOUS
        else:
            kind = ColumnKind.CATEGORICAL if observed else ColumnKind.CONTINUOUS
        columns.append(Column(col_name, kind, tuple(cells)))
    return Dataset(name=name, columns=tuple(columns), row_count=len(raw_rows))


def _observed(col: Column) -> list:
    return [v for v in col.values if v is not None]


def _histogram(values: list[float], bins: int) -> tuple[tuple[float, float, int], ...]:
    lo, hi = min(values), max(values)
    if lo == hi:
        return ((lo, hi, len(values)),)
    counts = [0] * bins
    span = hi - lo
    for v in values:
        idx = int((v - lo) / span * bins)
        counts[min(idx, bins - 1)] += 1
    edges = [lo + span * k / bins for k in range(bins)] + [hi]
    return tuple((edges[k], edges[k + 1], counts[k]) for k in range(bins))


def _pairwise_correlation(
    cols: tuple[Column, ...], warnings: list[str]
) -> tuple[tuple[float, ...], ...]:
    p = len(cols)
    arrays = [
        np.array([math.nan if v is None else v for v in c.values], dtype=float)
        for c in cols
    ]
    corr = np.eye(p)
    for i in range(p):
        for j in range(i + 1, p):
            a, b = arrays[i], arrays[j]
            ok = ~(np.isnan(a) | np.isnan(b))
            x, y = a[ok], b[ok]
            if len(x) < 2 or np.all(x == x[0]) or np.all(y == y[0]):
                r = 0.0
            else:
                with np.errstate(invalid="ignore", divide="ignore"):
                    r = float(np.corrcoef(x, y)[0, 1])
                if math.isnan(r):
                    r = 0.0
                r = max(-1.0, min(1.0, r))
            corr[i, j] = corr[j, i] = r
    for i in range(p):
        obs = _observed(cols[i])
        if obs and len(set(obs)) == 1:
            warnings.append(
                f"column {cols[i].name!r} is constant; its correlations are set to 0"
            )
    return tuple(tuple(row) for row in corr.tolist())


def profile(ds: Dataset, bins: int = DEFAULT_BINS) -> DatasetProfile:
    """Per-column statistics, histograms, pairwise-complete Pearson correlation."""
    if not ds.columns or ds.row_count < 1:
        raise ValueError("dataset must have at least one column and one row")
    warnings: list[str] = []
    profiles = []
    for col in ds.columns:
        obs = _observed(col)
        missing_rate = (ds.row_count - len(obs)) / ds.row_count
        unique = len(set(obs))
        if col.kind is ColumnKind.CONTINUOUS and obs:
            arr = np.asarray(obs, dtype=float)
            std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
            profiles.append(ColumnProfile(
                name=col.name,
                kind=col.kind,
                missing_rate=missing_rate,
                unique_count=unique,
                mean=float(arr.mean()),
                std=std,
                min=float(arr.min()),
                max=float(arr.max()),
                histogram=_histogram(obs, bins),
            ))
        else:
            if not obs:
                warnings.append(f"column {col.name!r} has no observed values")
            profiles.append(ColumnProfile(
                name=col.name,
                kind=col.kind,
                missing_rate=missing_rate,
                unique_count=unique,
            ))

    cont = ds.continuous_columns()
    correlation = _pairwise_correlation(cont, warnings)
    partial = DatasetProfile(
        columns=tuple(profiles),
        continuous_names=tuple(c.name for c in cont),
        correlation=correlation,
        friendliness=0,
        friendliness_reasons=(),
        warnings=tuple(warnings),
    )
    score, reasons = friendliness_score(partial, ds.row_count)
    return DatasetProfile(
        columns=partial.columns,
        continuous_names=partial.continuous_names,
        correlation=partial.correlation,
        friendliness=score,
        friendliness_reasons=tuple(reasons),
        warnings=partial.warnings,
    )


def friendliness_score(p: DatasetProfile, row_count: int) -> tuple[int, list[str]]:
    """Deterministic 0-100 suitability rubric with one reason per deduction.

    Deductions: 30 x mean missing rate; 20 when rows < 5 x columns^2;
    10 per constant column (capped at 30); 10 when some categorical column
    has more than row_count/2 distinct values.
    """
    reasons: list[str] = []
    total = 0.0

    mean_missing = sum(c.missing_rate for c in p.columns) / len(p.columns)
    if mean_missing > 0:
        d = 30.0 * mean_missing
        total += d
        reasons.append(
            f"-{d:g}: mean missing rate is {mean_missing:.3f}"
        )

    threshold = 5 * len(p.columns) ** 2
    if row_count < threshold:
        total += 20
        reasons.append(
            f"-20: only {row_count} rows; at least {threshold} recommended "
            f"for {len(p.columns)} columns"
        )

    constant = [c.name for c in p.columns if c.unique_count <= 1]
    if constant:
        d = min(10 * len(constant), 30)
        total += d
        reasons.append(
            f"-{d}: constant column(s) {', '.join(constant)}"
        )

    high_card = [
        c.name for c in p.columns
        if c.kind is ColumnKind.CATEGORICAL and c.unique_count > 0.5 * row_count
    ]
    if high_card:
        total += 10
        reasons.append(
            f"-10: categorical column(s) with very high cardinality: "
            f"{', '.join(high_card)}"
        )

    score = int(round(100 - total))
    return max(0, min(100, score)), reasons


def prepare_for_discovery(ds: Dataset, policy: MissingPolicy) -> Dataset:
    """Produce a dataset with no missing cells for structure learning.

    DROP_ROWS removes every row containing a missing cell (at least 10
    complete rows must remain). MEAN_IMPUTE fills numeric gaps with the
    column mean and categorical gaps with the most frequent label.
    """
    if not ds.has_missing():
        return ds
    if policy is MissingPolicy.DROP_ROWS:
        keep = [
            r for r in range(ds.row_count)
            if all(c.values[r] is not None for c in ds.columns)
        ]
        if len(keep) < 10:
            raise TooFewRows(
                f"only {len(keep)} complete rows after dropping missing values"
            )
        cols = tuple(
            Column(c.name, c.kind, tuple(c.values[r] for r in keep))
            for c in ds.columns
        )
        return Dataset(ds.name, cols, len(keep))

    cols = []
    for c in ds.columns:
        obs = _observed(c)
        if not obs:
            raise TooFewRows(f"column {c.name!r} has no observed values to impute")
        if c.kind is ColumnKind.CONTINUOUS:
            fill = float(np.mean(obs))
        else:
            counts = Counter(obs)
            top = max(counts.values())
            fill = min(v for v, k in counts.items() if k == top)
        cols.append(Column(c.name, c.kind, tuple(
            fill if v is None else v for v in c.values
        )))
    return Dataset(ds.name, tuple(cols), ds.row_count)
