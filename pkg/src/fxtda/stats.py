"""Classical statistical features of the monthly return panel.

Covariance and correlation matrices, per-currency variances, and the
LOESS-based seasonal-trend decomposition used for exploratory analysis.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np
from statsmodels.tsa.seasonal import STL

from .ingest import ReturnPanel

__all__ = [
    "SymmetricMatrix",
    "StlDecomposition",
    "InsufficientDataError",
    "UndefinedCorrelationError",
    "covariance_matrix",
    "pearson_matrix",
    "spearman_matrix",
    "cross_correlation_matrix",
    "variance_summary",
    "stl_decompose",
    "write_matrix_csv",
    "read_matrix_csv",
    "matrix_to_json",
    "write_stl_csv",
]


class InsufficientDataError(ValueError):
    """Too few observations for the requested statistic."""


class UndefinedCorrelationError(ValueError):
    """Correlation undefined because a column is constant."""


@dataclass(frozen=True)
class SymmetricMatrix:
    """Square symmetric real matrix with row/column labels."""

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        n = len(self.labels)
        if vals.shape != (n, n):
            raise ValueError(f"matrix shape {vals.shape} does not match {n} labels")
        if not (vals == vals.T).all():
            raise ValueError("matrix is not exactly symmetric")

    @classmethod
    def from_upper(cls, labels, values) -> "SymmetricMatrix":
        """Build from any square matrix, mirroring the upper triangle so
        the symmetry invariant holds bitwise."""
        vals = np.array(values, dtype=float)
        i, j = np.triu_indices(vals.shape[0], k=1)
        vals[j, i] = vals[i, j]
        return cls(tuple(labels), vals)

    def entry(self, a: str, b: str) -> float:
        return float(self.values[self.labels.index(a), self.labels.index(b)])


def _require_rows(panel: ReturnPanel, n: int) -> None:
    if panel.n_rows < n:
        raise InsufficientDataError(f"need at least {n} rows, got {panel.n_rows}")


def covariance_matrix(panel: ReturnPanel) -> SymmetricMatrix:
    """Sample covariance (n-1 denominator) of a standardised panel.

    On standardised input this is numerically the Pearson correlation
    matrix, which is why the panel is required to be standardised.
    """
    if not panel.standardized:
        raise ValueError("covariance_matrix expects a standardised panel")
    _require_rows(panel, 3)
    cov = np.cov(panel.values, rowvar=False, ddof=1)
    return SymmetricMatrix.from_upper(panel.currencies, cov)


def pearson_matrix(panel: ReturnPanel) -> SymmetricMatrix:
    """Pearson correlation matrix of the panel columns."""
    _require_rows(panel, 3)
    stds = panel.values.std(axis=0, ddof=1)
    dead = np.flatnonzero(stds == 0.0)
    if dead.size:
        raise UndefinedCorrelationError(
            f"constant column(s): {[panel.currencies[i] for i in dead]}"
        )
    corr = np.clip(np.corrcoef(panel.values, rowvar=False), -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return SymmetricMatrix.from_upper(panel.currencies, corr)


def _rank_average(column: np.ndarray) -> np.ndarray:
    from scipy.stats import rankdata

    return rankdata(column, method="average")


def spearman_matrix(panel: ReturnPanel) -> SymmetricMatrix:
    """Pearson correlation of column-wise average ranks (ties averaged)."""
    _require_rows(panel, 3)
    ranks = np.column_stack([_rank_average(panel.values[:, j]) for j in range(len(panel.currencies))])
    stds = ranks.std(axis=0, ddof=1)
    dead = np.flatnonzero(stds == 0.0)
    if dead.size:
        raise UndefinedCorrelationError(
            f"constant column(s): {[panel.currencies[i] for i in dead]}"
        )
    corr = np.clip(np.corrcoef(ranks, rowvar=False), -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return SymmetricMatrix.from_upper(panel.currencies, corr)


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt((xc * xc).sum() * (yc * yc).sum())
    if denom == 0.0:
        raise UndefinedCorrelationError("constant slice in lagged correlation")
    return float((xc * yc).sum() / denom)


def cross_correlation_matrix(panel: ReturnPanel, max_lag: int = 1) -> SymmetricMatrix:
    """Signed correlation at the lag of maximum absolute correlation.

    Entry (i, j) scans lags -max_lag..+max_lag of column j against
    column i, re-centring each overlapping slice, and reports the signed
    coefficient whose absolute value is largest.  Ties between lags
    prefer the smaller ``|lag|``, then the positive lag.  Symmetric by
    construction because lag L for (i, j) is lag -L for (j, i).
    """
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    _require_rows(panel, max_lag + 3)
    n = len(panel.currencies)
    vals = np.eye(n)
    # Scan order puts preferred lags first so a strict ">" keeps them on ties.
    lags = sorted(range(-max_lag, max_lag + 1), key=lambda L: (abs(L), -L))
    for i in range(n):
        for j in range(i + 1, n):
            x, y = panel.values[:, i], panel.values[:, j]
            best = 0.0
            for lag in lags:
                if lag >= 0:
                    rho = _pearson(x[lag:], y[: len(y) - lag] if lag else y)
                else:
                    rho = _pearson(x[:lag], y[-lag:])
                if abs(rho) > abs(best):
                    best = rho
            vals[i, j] = best
    return SymmetricMatrix.from_upper(panel.currencies, vals)


def variance_summary(panel: ReturnPanel) -> dict[str, float]:
    """Sample variance (n-1) of each currency's log-returns."""
    _require_rows(panel, 2)
    var = panel.values.var(axis=0, ddof=1)
    return {code: float(v) for code, v in zip(panel.currencies, var)}


@dataclass(frozen=True)
class StlDecomposition:
    """Additive trend/seasonal/residual split of one monthly series."""

    trend: np.ndarray
    seasonal: np.ndarray
    residual: np.ndarray
    period: int

    def reconstruct(self) -> np.ndarray:
        return self.trend + self.seasonal + self.residual


def stl_decompose(
    series: np.ndarray,
    period: int = 12,
    *,
    seasonal_span: int = 7,
    trend_span: int | None = None,
    inner_iter: int = 2,
    outer_iter: int = 1,
) -> StlDecomposition:
    """Seasonal-trend decomposition via LOESS.

    Runs the standard STL inner/outer loop (cycle-subseries seasonal
    LOESS, low-pass filter, trend LOESS, robustness reweighting).  The
    default trend span is the smallest odd integer at least
    ``1.5 * period / (1 - 1.5 / seasonal_span)``.  The residual is
    defined as ``series - trend - seasonal`` so the additive identity
    holds to rounding error.
    """
    series = np.asarray(series, dtype=float)
    if series.ndim != 1:
        raise ValueError("stl_decompose expects a 1-D series")
    if len(series) < 2 * period:
        raise InsufficientDataError(
            f"series length {len(series)} is shorter than two periods ({2 * period})"
        )
    fit = STL(
        series,
        period=period,
        seasonal=seasonal_span,
        trend=trend_span,
        robust=False,
    ).fit(inner_iter=inner_iter, outer_iter=outer_iter)
    trend = np.asarray(fit.trend, dtype=float)
    seasonal = np.asarray(fit.seasonal, dtype=float)
    residual = series - trend - seasonal
    return StlDecomposition(trend, seasonal, residual, period)


def write_matrix_csv(matrix: SymmetricMatrix, path) -> None:
    """Labelled CSV: header row/column carry the currency codes."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["", *matrix.labels])
        for i, label in enumerate(matrix.labels):
            writer.writerow([label, *(repr(float(v)) for v in matrix.values[i])])


def read_matrix_csv(path) -> SymmetricMatrix:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        labels = tuple(header[1:])
        rows = [[float(v) for v in row[1:]] for row in reader if row]
    return SymmetricMatrix(labels, np.array(rows))


def matrix_to_json(matrix: SymmetricMatrix) -> str:
    return json.dumps(
        {"labels": list(matrix.labels), "values": matrix.values.tolist()},
        sort_keys=True,
    )


def write_stl_csv(decomp: StlDecomposition, path) -> None:
    """Three-column CSV of the decomposition components."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trend", "seasonal", "residual"])
        for t, s, r in zip(decomp.trend, decomp.seasonal, decomp.residual):
            writer.writerow([repr(float(t)), repr(float(s)), repr(float(r))])
