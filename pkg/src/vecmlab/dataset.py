"""Quarterly panel ingestion, validation, transforms and descriptive statistics."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError

_QUARTER_RE = re.compile(r"^\s*(\d{4})\s*[Qq]\s*([1-4])\s*$")
_ISO_RE = re.compile(r"^\s*(\d{4})-(\d{2})-(\d{2})\s*$")

TRANSFORMS = ("level", "log")
ADF_DETERMINISTIC = ("c", "ct")


def parse_quarter(label: str) -> int:
    """Map a ``YYYYQn`` label or a first-day-of-quarter ISO date to an integer period.

    The integer is ``4 * year + (quarter - 1)`` so consecutive quarters differ by one.
    """
    m = _QUARTER_RE.match(label)
    if m:
        return 4 * int(m.group(1)) + int(m.group(2)) - 1
    m = _ISO_RE.match(label)
    if m:
        year, month, day = (int(g) for g in m.groups())
        if month not in (1, 4, 7, 10) or day != 1:
            raise DataError(
                f"date {label!r} is not the first day of a quarter; "
                "only quarterly data is accepted"
            )
        return 4 * year + (month - 1) // 3
    raise DataError(f"unparseable date {label!r}; expected YYYYQn or YYYY-MM-DD")


def format_quarter(period: int) -> str:
    return f"{period // 4}Q{period % 4 + 1}"


@dataclass(frozen=True)
class TimeSeriesTable:
    """Balanced quarterly panel.

    ``values`` has one row per quarter and one column per variable. The array
    is made read-only on construction; use :meth:`replace_values` to derive a
    new table.
    """

    dates: tuple[str, ...]
    names: tuple[str, ...]
    values: np.ndarray
    provenance: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim == 1:
            values = values[:, None]
        object.__setattr__(self, "dates", tuple(format_quarter(parse_quarter(d)) for d in self.dates))
        object.__setattr__(self, "names", tuple(str(n) for n in self.names))
        if values.ndim != 2:
            raise DataError("values must be a T x K matrix")
        T, K = values.shape
        if T < 1 or K < 1:
            raise DataError("table must have at least one row and one column")
        if len(self.dates) != T:
            raise DataError(f"{len(self.dates)} dates for {T} rows")
        if len(self.names) != K:
            raise DataError(f"{len(self.names)} names for {K} columns")
        if len(set(self.names)) != K:
            dup = sorted({n for n in self.names if self.names.count(n) > 1})
            raise DataError(f"duplicate column names: {dup}")
        periods = [parse_quarter(d) for d in self.dates]
        for prev, cur in zip(periods, periods[1:]):
            if cur == prev:
                raise DataError(f"duplicate period {format_quarter(cur)}")
            if cur < prev:
                raise DataError(f"dates not increasing at {format_quarter(cur)}")
            if cur != prev + 1:
                missing = ", ".join(format_quarter(p) for p in range(prev + 1, cur))
                raise DataError(f"gap in quarterly dates: missing {missing}")
        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            i, j = bad[0]
            raise DataError(f"non-finite value at {self.dates[i]}, column {self.names[j]!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "provenance", dict(self.provenance))

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def K(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.index(name)]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}; have {list(self.names)}") from None

    def select(self, names: Sequence[str]) -> "TimeSeriesTable":
        idx = [self.index(n) for n in names]
        prov = {n: self.provenance[n] for n in names if n in self.provenance}
        return TimeSeriesTable(self.dates, tuple(names), self.values[:, idx], prov)

    def replace_values(self, values: np.ndarray) -> "TimeSeriesTable":
        return TimeSeriesTable(self.dates, self.names, values, self.provenance)

    @classmethod
    def from_array(cls, values, names=None, start: str = "2000Q1") -> "TimeSeriesTable":
        """Build a table from a bare array, labelling rows with consecutive quarters."""
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if names is None:
            names = [f"y{i + 1}" for i in range(values.shape[1])]
        p0 = parse_quarter(start)
        dates = [format_quarter(p0 + t) for t in range(values.shape[0])]
        return cls(tuple(dates), tuple(names), values)


def load_table(path, date_column: str = "date") -> TimeSeriesTable:
    """Read a comma-delimited quarterly panel with a header row."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"input file not found: {path}")
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if date_column not in header:
        raise DataError(f"{path}: date column {date_column!r} not in header {header}")
    di = header.index(date_column)
    names = [h for i, h in enumerate(header) if i != di]
    dates, data = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"{path}: row {lineno} has {len(row)} cells, expected {len(header)}")
        dates.append(row[di].strip())
        vals = []
        for i, cell in enumerate(row):
            if i == di:
                continue
            try:
                vals.append(float(cell))
            except ValueError:
                raise DataError(
                    f"{path}: unparseable cell {cell!r} at row {lineno}, column {header[i]!r}"
                ) from None
        data.append(vals)
    if not data:
        raise DataError(f"{path}: no data rows")
    return TimeSeriesTable(tuple(dates), tuple(names), np.array(data, dtype=float))


def save_table(table: TimeSeriesTable, path, date_column: str = "date") -> None:
    """Write ``table`` as CSV with 17 significant digits so that reloading is exact."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([date_column, *table.names])
        for d, row in zip(table.dates, table.values):
            w.writerow([d, *(f"{v:.17g}" for v in row)])


@dataclass(frozen=True)
class TransformSpec:
    """Per-variable level/log choice and ADF deterministic case (``c`` or ``ct``)."""

    transforms: Mapping[str, str]
    adf_deterministic: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for name, t in self.transforms.items():
            if t not in TRANSFORMS:
                raise ValueError(f"transform for {name!r} must be one of {TRANSFORMS}, got {t!r}")
        for name, d in self.adf_deterministic.items():
            if d not in ADF_DETERMINISTIC:
                raise ValueError(f"ADF deterministic for {name!r} must be one of {ADF_DETERMINISTIC}")


def apply_transforms(table: TimeSeriesTable, spec: TransformSpec) -> TimeSeriesTable:
    missing = [n for n in table.names if n not in spec.transforms]
    extra = [n for n in spec.transforms if n not in table.names]
    if missing or extra:
        raise DataError(f"transform spec mismatch: missing {missing}, unknown {extra}")
    out = np.array(table.values, copy=True)
    for j, name in enumerate(table.names):
        if spec.transforms[name] != "log":
            continue
        col = out[:, j]
        bad = np.flatnonzero(col <= 0)
        if bad.size:
            i = bad[0]
            raise DataError(
                f"log transform of {name!r} needs positive values; got {col[i]!r} at {table.dates[i]}"
            )
        out[:, j] = np.log(col)
    return table.replace_values(out)


def first_difference(series) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValueError("first_difference expects a vector")
    if x.size < 2:
        raise ValueError("need at least two observations to difference")
    return x[1:] - x[:-1]


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    mean: float
    sd: float
    min: float
    p25: float
    p50: float
    p75: float
    max: float
    sd_defined: bool = True

    def as_dict(self) -> dict:
        return {
            "N": self.n, "mean": self.mean, "sd": self.sd, "min": self.min,
            "p25": self.p25, "p50": self.p50, "p75": self.p75, "max": self.max,
            "sd_defined": self.sd_defined,
        }


def describe(x) -> DescriptiveStats:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("cannot describe an empty series")
    n = x.size
    sd = float(np.std(x, ddof=1)) if n > 1 else 0.0
    # numpy's default "linear" method interpolates between order statistics
    p25, p50, p75 = (float(v) for v in np.percentile(x, [25, 50, 75]))
    return DescriptiveStats(
        n=n, mean=float(np.mean(x)), sd=sd, min=float(x.min()),
        p25=p25, p50=p50, p75=p75, max=float(x.max()), sd_defined=n > 1,
    )


def descriptive_stats(table: TimeSeriesTable) -> dict[str, DescriptiveStats]:
    return {name: describe(table.values[:, j]) for j, name in enumerate(table.names)}


def quarter_span(table: TimeSeriesTable) -> str:
    return f"{table.dates[0]}-{table.dates[-1]}"

