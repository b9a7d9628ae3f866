"""Ingestion of FX reference-rate time series.

Turns raw per-currency CSV files into a cleaned, aligned panel of daily
rates and from there into the standardised monthly log-return panel that
every downstream feature extractor consumes.  All operations are pure
functions over immutable panel objects.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, replace
from typing import IO, Iterable, Sequence

import numpy as np

__all__ = [
    "RatePanel",
    "ReturnPanel",
    "IngestError",
    "CsvParseError",
    "EmptyInputError",
    "DisjointRangesError",
    "DegenerateColumnError",
    "parse_rate_csv",
    "read_wide_csv",
    "merge_and_interpolate",
    "resample_monthly",
    "log_returns",
    "standardize",
    "write_panel_csv",
    "read_panel_csv",
]


class IngestError(ValueError):
    """Base class for ingestion failures."""


class CsvParseError(IngestError):
    """Malformed CSV structure (bad header, unparseable date)."""


class EmptyInputError(IngestError):
    """Input contained no data rows."""


class DisjointRangesError(IngestError):
    """Panels share no overlapping date span."""


class DegenerateColumnError(IngestError):
    """A column is constant where variation is required."""


@dataclass(frozen=True)
class RatePanel:
    """Dated matrix of reference rates, one column per currency.

    ``values`` holds rates in units of currency per EUR.  Entries may be
    NaN only between :func:`parse_rate_csv` and
    :func:`merge_and_interpolate`; merged panels are strictly positive
    and gap-free.
    """

    dates: np.ndarray  # datetime64[D], strictly increasing
    currencies: tuple[str, ...]
    values: np.ndarray  # shape (len(dates), len(currencies))

    def __post_init__(self):
        object.__setattr__(self, "dates", np.asarray(self.dates, dtype="datetime64[D]"))
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "currencies", tuple(self.currencies))
        if vals.shape != (len(self.dates), len(self.currencies)):
            raise IngestError(
                f"panel shape {vals.shape} does not match "
                f"{len(self.dates)} dates x {len(self.currencies)} currencies"
            )
        if len(self.dates) > 1 and not (np.diff(self.dates.astype("int64")) > 0).all():
            raise IngestError("panel dates must be strictly increasing")

    @property
    def n_rows(self) -> int:
        return len(self.dates)

    def column(self, code: str) -> np.ndarray:
        return self.values[:, self.currencies.index(code)]

    def validate_clean(self) -> None:
        """Assert the post-merge invariant: all rates finite and positive."""
        if not np.isfinite(self.values).all():
            raise IngestError("panel contains non-finite rates")
        if not (self.values > 0).all():
            raise IngestError("panel contains non-positive rates")


@dataclass(frozen=True)
class ReturnPanel:
    """Monthly log-return matrix, optionally standardised per column."""

    dates: np.ndarray  # datetime64[D] month-end dates
    currencies: tuple[str, ...]
    values: np.ndarray
    standardized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "dates", np.asarray(self.dates, dtype="datetime64[D]"))
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "currencies", tuple(self.currencies))
        if vals.shape != (len(self.dates), len(self.currencies)):
            raise IngestError("return panel shape mismatch")
        if not np.isfinite(vals).all():
            raise IngestError("return panel contains non-finite entries")

    @property
    def n_rows(self) -> int:
        return len(self.dates)

    def column(self, code: str) -> np.ndarray:
        return self.values[:, self.currencies.index(code)]


def _as_text_lines(source) -> Iterable[str]:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8-sig")).readlines()
    if isinstance(source, str):
        return io.StringIO(source).readlines()
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return io.StringIO(data).readlines()


def _parse_date(text: str, date_format: str, line_no: int) -> np.datetime64:
    from datetime import datetime

    try:
        return np.datetime64(datetime.strptime(text.strip(), date_format).date(), "D")
    except ValueError as exc:
        raise CsvParseError(f"line {line_no}: unparseable date {text!r}") from exc


def parse_rate_csv(
    source: bytes | str | IO,
    currency_code: str,
    *,
    delimiter: str = ",",
    date_column: str = "date",
    rate_column: str = "rate",
    date_format: str = "%Y-%m-%d",
) -> RatePanel:
    """Parse one currency's delimited rate file into a single-column panel.

    Rows are sorted by date.  Rates that fail to parse or are not
    strictly positive are kept as NaN (missing) and reported via a
    ``UserWarning``; they are filled later by
    :func:`merge_and_interpolate`.

    Raises
    ------
    CsvParseError
        If the header lacks the configured columns or a date is
        malformed (the message names the offending line).
    EmptyInputError
        If the file holds no data rows.
    """
    lines = list(_as_text_lines(source))
    if not lines:
        raise EmptyInputError(f"{currency_code}: empty input")
    reader = csv.reader(lines, delimiter=delimiter)
    header = [h.strip() for h in next(reader)]
    try:
        date_idx = header.index(date_column)
        rate_idx = header.index(rate_column)
    except ValueError:
        raise CsvParseError(
            f"line 1: header {header!r} lacks required columns "
            f"{date_column!r}/{rate_column!r}"
        ) from None

    dates: list[np.datetime64] = []
    rates: list[float] = []
    n_missing = 0
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) <= max(date_idx, rate_idx):
            raise CsvParseError(f"line {line_no}: expected {len(header)} fields, got {len(row)}")
        dates.append(_parse_date(row[date_idx], date_format, line_no))
        raw = row[rate_idx].strip()
        try:
            rate = float(raw)
        except ValueError:
            rate = math.nan
        if not math.isfinite(rate) or rate <= 0.0:
            if raw not in ("", "NA", "N/A", "-"):
                n_missing += 1
            rate = math.nan
        rates.append(rate)

    if not dates:
        raise EmptyInputError(f"{currency_code}: no data rows")
    if n_missing:
        warnings.warn(
            f"{currency_code}: {n_missing} non-positive or unparseable rate(s) flagged missing",
            stacklevel=2,
        )

    date_arr = np.array(dates, dtype="datetime64[D]")
    rate_arr = np.array(rates, dtype=float)
    order = np.argsort(date_arr, kind="stable")
    date_arr, rate_arr = date_arr[order], rate_arr[order]
    if len(np.unique(date_arr)) != len(date_arr):
        dup = date_arr[np.flatnonzero(np.diff(date_arr.astype("int64")) == 0)[0]]
        raise CsvParseError(f"{currency_code}: duplicate date {dup}")
    return RatePanel(date_arr, (currency_code,), rate_arr[:, None])


def read_wide_csv(
    source: bytes | str | IO,
    currencies: Sequence[str] | None = None,
    *,
    delimiter: str = ",",
    date_column: str = "Date",
    date_format: str = "%Y-%m-%d",
) -> list[RatePanel]:
    """Split a wide panel CSV (date plus one column per currency) into
    single-currency panels.

    This is the layout of the ECB ``eurofxref-hist.csv`` bulk download.
    ``currencies`` restricts and orders the columns; by default every
    non-date column is taken in file order.
    """
    lines = list(_as_text_lines(source))
    if not lines:
        raise EmptyInputError("empty wide CSV")
    reader = csv.reader(lines, delimiter=delimiter)
    header = [h.strip() for h in next(reader)]
    if date_column not in header:
        raise CsvParseError(f"line 1: header lacks date column {date_column!r}")
    date_idx = header.index(date_column)
    codes = [c for c in header if c and c != date_column]
    if currencies is not None:
        missing = [c for c in currencies if c not in codes]
        if missing:
            raise CsvParseError(f"wide CSV lacks currency column(s) {missing}")
        codes = list(currencies)
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        raise EmptyInputError("wide CSV has no data rows")

    panels = []
    for code in codes:
        col_idx = header.index(code)
        buf = [f"date{delimiter}rate"]
        for row in rows:
            cell = row[col_idx].strip() if col_idx < len(row) else ""
            buf.append(f"{row[date_idx]}{delimiter}{cell}")
        panels.append(
            parse_rate_csv(
                "\n".join(buf),
                code,
                delimiter=delimiter,
                date_format=date_format,
            )
        )
    return panels


def merge_and_interpolate(panels: Sequence[RatePanel]) -> RatePanel:
    """Align single-currency panels on a common daily axis.

    The date axis is the union of observation dates inside the maximal
    span covered by every panel's non-missing observations; interior
    gaps are filled by linear interpolation on the rate level against
    calendar days.  Leading/trailing gaps shrink the range instead of
    being extrapolated.
    """
    if not panels:
        raise EmptyInputError("no panels to merge")
    firsts, lasts = [], []
    for p in panels:
        valid = np.flatnonzero(np.isfinite(p.values[:, 0]))
        if valid.size == 0:
            raise EmptyInputError(f"{p.currencies[0]}: no valid observations")
        firsts.append(p.dates[valid[0]])
        lasts.append(p.dates[valid[-1]])
    start, end = max(firsts), min(lasts)
    if start > end:
        raise DisjointRangesError(
            f"no common date overlap (latest start {start}, earliest end {end})"
        )

    all_dates = np.unique(np.concatenate([p.dates for p in panels]))
    axis = all_dates[(all_dates >= start) & (all_dates <= end)]
    axis_days = axis.astype("int64")

    columns = []
    codes: list[str] = []
    for p in panels:
        col = p.values[:, 0]
        valid = np.isfinite(col)
        obs_days = p.dates[valid].astype("int64")
        obs_vals = col[valid]
        columns.append(np.interp(axis_days, obs_days, obs_vals))
        codes.append(p.currencies[0])
    merged = RatePanel(axis, tuple(codes), np.column_stack(columns))
    merged.validate_clean()
    return merged


def _month_end(month: np.datetime64) -> np.datetime64:
    return (month + 1).astype("datetime64[D]") - 1


def resample_monthly(panel: RatePanel, rule: str = "last") -> RatePanel:
    """Aggregate a daily panel to one row per calendar month.

    ``rule="last"`` keeps the last available daily rate of the month
    (the convention for building monthly returns from daily prices);
    ``rule="mean"`` averages the month's observations.  Rows are
    labelled with the calendar month-end date.
    """
    if rule not in ("last", "mean"):
        raise IngestError(f"unknown monthly aggregation rule {rule!r}")
    months = panel.dates.astype("datetime64[M]")
    uniq = np.unique(months)
    if len(uniq) < 2:
        raise IngestError("need at least two calendar months to resample")
    out = np.empty((len(uniq), len(panel.currencies)))
    for row, month in enumerate(uniq):
        idx = np.flatnonzero(months == month)
        assert idx.size > 0
        if rule == "last":
            out[row] = panel.values[idx[-1]]
        else:
            out[row] = panel.values[idx].mean(axis=0)
    dates = np.array([_month_end(m) for m in uniq], dtype="datetime64[D]")
    return RatePanel(dates, panel.currencies, out)


def log_returns(panel: RatePanel) -> ReturnPanel:
    """Month-over-month log returns: ``r_t = ln(P_t) - ln(P_t-1)``."""
    if panel.n_rows < 2:
        raise IngestError("need at least two rows for returns")
    if not (np.isfinite(panel.values).all() and (panel.values > 0).all()):
        raise IngestError("rates must be positive and finite; clean the panel first")
    logs = np.log(panel.values)
    return ReturnPanel(panel.dates[1:], panel.currencies, np.diff(logs, axis=0))


def standardize(panel: ReturnPanel) -> ReturnPanel:
    """Z-score each column to zero mean and unit sample (n-1) deviation."""
    if panel.n_rows < 2:
        raise IngestError("need at least two rows to standardize")
    mean = panel.values.mean(axis=0)
    std = panel.values.std(axis=0, ddof=1)
    dead = np.flatnonzero(std == 0.0)
    if dead.size:
        raise DegenerateColumnError(
            f"zero-variance column(s): {[panel.currencies[i] for i in dead]}"
        )
    return replace(panel, values=(panel.values - mean) / std, standardized=True)


def _format_value(x: float) -> str:
    return repr(float(x))


def write_panel_csv(panel: RatePanel | ReturnPanel, path) -> None:
    """Serialize a panel to columnar CSV (``date,<code>,<code>,...``)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", *panel.currencies])
        for i, d in enumerate(panel.dates):
            writer.writerow([str(d), *(_format_value(v) for v in panel.values[i])])


def read_panel_csv(path, *, returns: bool = False, standardized: bool = False):
    """Read back a panel written by :func:`write_panel_csv`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "date":
            raise CsvParseError(f"{path}: line 1: expected 'date' as first column")
        codes = tuple(header[1:])
        dates, rows = [], []
        for row in reader:
            if not row:
                continue
            dates.append(np.datetime64(row[0], "D"))
            rows.append([float(v) for v in row[1:]])
    if not dates:
        raise EmptyInputError(f"{path}: no rows")
    values = np.array(rows)
    date_arr = np.array(dates, dtype="datetime64[D]")
    if returns:
        return ReturnPanel(date_arr, codes, values, standardized=standardized)
    return RatePanel(date_arr, codes, values)
