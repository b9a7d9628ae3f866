"""From raw daily rate files to the standardised monthly return panel.

Walks the full ingest chain on synthetic data: parse per-currency CSVs,
align them on a common daily axis (interior gaps linearly interpolated),
resample to month-ends, take log-returns, and z-score each column.
"""

import tempfile
from pathlib import Path

import numpy as np

from fxtda import log_returns, merge_and_interpolate, parse_rate_csv, resample_monthly, standardize
from fxtda.synthetic import write_synthetic_dataset

CURRENCIES = ("AAA", "BBB", "CCC", "DDD")

workdir = Path(tempfile.mkdtemp(prefix="fxtda_demo_"))
write_synthetic_dataset(workdir, CURRENCIES, n_days=1800, seed=42)
print(f"synthetic daily rate files in {workdir}")

panels = []
for code in CURRENCIES:
    with open(workdir / f"{code}.csv", "rb") as fh:
        panels.append(parse_rate_csv(fh, code))
    print(f"  {code}: {panels[-1].n_rows} daily rows, "
          f"{int(np.isnan(panels[-1].values).sum())} missing")

merged = merge_and_interpolate(panels)
merged.validate_clean()
print(f"\nmerged panel: {merged.n_rows} days x {len(merged.currencies)} currencies, "
      f"{merged.dates[0]} .. {merged.dates[-1]}")

monthly = resample_monthly(merged)          # last daily observation per month
returns = log_returns(monthly)              # r_t = ln(P_t / P_{t-1})
standardized = standardize(returns)         # per-column z-scores

print(f"monthly rates: {monthly.n_rows} rows -> returns: {returns.n_rows} rows")
print("\nper-currency return summary (raw):")
for code in returns.currencies:
    col = returns.column(code)
    print(f"  {code}: mean {col.mean():+.5f}  sd {col.std(ddof=1):.5f}")

print("\nafter standardisation every column has mean 0, sd 1:")
print(f"  max |mean| = {np.abs(standardized.values.mean(axis=0)).max():.2e}")
print(f"  max |sd - 1| = {np.abs(standardized.values.std(axis=0, ddof=1) - 1).max():.2e}")
