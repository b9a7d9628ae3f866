"""Deterministic synthetic rate data for demos and tests.

Generates daily reference-rate files shaped like the real inputs
(weekday calendar, geometric random walk with mild seasonality, a few
missing rows) without any network access.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

__all__ = ["synthetic_rates", "write_synthetic_dataset"]


def synthetic_rates(
    code: str,
    n_days: int,
    seed: int,
    start: str = "2000-01-03",
) -> tuple[np.ndarray, np.ndarray]:
    """One currency's weekday dates and positive rate levels."""
    # string hash() is salted per process; derive a stable stream id instead
    code_id = int.from_bytes(code.encode("utf-8"), "big") % (2**31)
    rng = np.random.default_rng([seed, code_id])
    day = np.datetime64(start, "D")
    dates = []
    while len(dates) < n_days:
        if np.is_busday(day):
            dates.append(day)
        day += 1
    dates = np.array(dates, dtype="datetime64[D]")
    drift = rng.normal(0.0, 2e-4)
    vol = rng.uniform(0.002, 0.01)
    shocks = rng.normal(drift, vol, size=n_days)
    t = np.arange(n_days)
    seasonal = 0.002 * np.sin(2 * np.pi * t / 252.0 + rng.uniform(0, 2 * np.pi))
    levels = float(rng.uniform(0.5, 50.0)) * np.exp(np.cumsum(shocks) + seasonal)
    return dates, levels


def write_synthetic_dataset(
    directory,
    currencies,
    n_days: int = 2200,
    seed: int = 0,
    missing_every: int = 97,
) -> Path:
    """Write one ``<CODE>.csv`` per currency; every ``missing_every``-th
    row gets an empty rate cell to exercise interpolation."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for code in currencies:
        dates, levels = synthetic_rates(code, n_days, seed)
        with open(directory / f"{code}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["date", "rate"])
            for i, (d, v) in enumerate(zip(dates, levels)):
                cell = "" if missing_every and i % missing_every == missing_every - 1 and 0 < i < n_days - 1 else repr(float(v))
                writer.writerow([str(d), cell])
    return directory


def write_synthetic_wide_csv(
    path,
    currencies,
    start: str = "2000-01-13",
    end: str = "2022-03-01",
    seed: int = 0,
) -> Path:
    """One wide CSV shaped like the ECB bulk download: a ``Date`` column
    plus one rate column per currency, rows newest first, occasional
    ``N/A`` cells."""
    start_d, end_d = np.datetime64(start, "D"), np.datetime64(end, "D")
    all_days = np.arange(start_d, end_d + 1)
    calendar = all_days[np.is_busday(all_days)]
    n = len(calendar)
    columns = {}
    for code in currencies:
        code_id = int.from_bytes(code.encode("utf-8"), "big") % (2**31)
        rng = np.random.default_rng([seed, code_id])
        drift = rng.normal(0.0, 2e-4)
        vol = rng.uniform(0.002, 0.01)
        shocks = rng.normal(drift, vol, size=n)
        seasonal = 0.002 * np.sin(2 * np.pi * np.arange(n) / 252.0 + rng.uniform(0, 2 * np.pi))
        columns[code] = float(rng.uniform(0.5, 50.0)) * np.exp(np.cumsum(shocks) + seasonal)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Date", *currencies])
        for i in range(n - 1, -1, -1):  # newest first, like the ECB file
            row = [str(calendar[i])]
            for c, code in enumerate(currencies):
                row.append("N/A" if (i + c) % 251 == 250 and 0 < i < n - 1 else repr(float(columns[code][i])))
            writer.writerow(row)
    return path
