"""Shared synthetic data helper for the demo scripts."""

import tempfile
from pathlib import Path

from fxtda import log_returns, merge_and_interpolate, parse_rate_csv, resample_monthly, standardize
from fxtda.ingest import ReturnPanel
from fxtda.synthetic import write_synthetic_dataset


def standardized_panel(currencies, seed: int = 0, n_days: int = 1800, standardize_panel: bool = True) -> ReturnPanel:
    workdir = Path(tempfile.mkdtemp(prefix="fxtda_demo_data_"))
    write_synthetic_dataset(workdir, currencies, n_days=n_days, seed=seed)
    panels = []
    for code in currencies:
        with open(workdir / f"{code}.csv", "rb") as fh:
            panels.append(parse_rate_csv(fh, code))
    returns = log_returns(resample_monthly(merge_and_interpolate(panels)))
    return standardize(returns) if standardize_panel else returns


def output_dir(name: str) -> Path:
    out = Path(__file__).parent / "output" / name
    out.mkdir(parents=True, exist_ok=True)
    return out
