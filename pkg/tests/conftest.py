import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fxtda.config import PipelineConfig
from fxtda.ingest import ReturnPanel, standardize
from fxtda.synthetic import write_synthetic_dataset

TEST_CURRENCIES = ("AAA", "BBB", "CCC", "DDD", "EEE", "FFF")


@pytest.fixture(scope="session")
def synthetic_data_dir(tmp_path_factory) -> Path:
    """Per-currency daily CSVs: ~5.5 years of weekdays, a few gaps."""
    directory = tmp_path_factory.mktemp("rates")
    write_synthetic_dataset(directory, TEST_CURRENCIES, n_days=1430, seed=20)
    return directory


@pytest.fixture(scope="session")
def pipeline_config(synthetic_data_dir) -> PipelineConfig:
    return PipelineConfig(
        data_path=synthetic_data_dir,
        currencies=TEST_CURRENCIES,
        k=3,
        seed=11,
        k_max_elbow=5,
        mds_dim=4,
        grid_size=60,
    )


def month_end_dates(n_rows: int, start: str = "2001-01") -> np.ndarray:
    months = np.datetime64(start, "M") + np.arange(n_rows)
    return (months + 1).astype("datetime64[D]") - 1


def random_return_panel(rng: np.random.Generator, n_rows: int = 40, codes=("AAA", "BBB", "CCC")) -> ReturnPanel:
    values = rng.normal(0.0, 0.03, size=(n_rows, len(codes)))
    return ReturnPanel(month_end_dates(n_rows), tuple(codes), values)


@pytest.fixture
def std_panel() -> ReturnPanel:
    rng = np.random.default_rng(7)
    return standardize(random_return_panel(rng, 48))
