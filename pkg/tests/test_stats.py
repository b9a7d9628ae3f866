import numpy as np
import pytest

from fxtda.ingest import ReturnPanel, standardize
from fxtda.stats import (
    InsufficientDataError,
    SymmetricMatrix,
    UndefinedCorrelationError,
    covariance_matrix,
    cross_correlation_matrix,
    matrix_to_json,
    pearson_matrix,
    read_matrix_csv,
    spearman_matrix,
    stl_decompose,
    variance_summary,
    write_matrix_csv,
)
from conftest import month_end_dates
from oracles import covariance_naive, spearman_naive


def panel_from(values: np.ndarray, codes=None, standardized=False) -> ReturnPanel:
    values = np.asarray(values, dtype=float)
    codes = codes or tuple(f"C{i}" for i in range(values.shape[1]))
    return ReturnPanel(month_end_dates(len(values)), codes, values, standardized=standardized)


class TestCovariance:
    def test_equals_pearson_on_standardized(self, std_panel):
        cov = covariance_matrix(std_panel)
        pearson = pearson_matrix(std_panel)
        assert cov.values == pytest.approx(pearson.values, abs=1e-9)
        assert np.diag(cov.values) == pytest.approx(np.ones(3), abs=1e-9)

    def test_identical_columns_unit_covariance(self):
        rng = np.random.default_rng(0)
        col = rng.normal(size=30)
        panel = standardize(panel_from(np.column_stack([col, col])))
        cov = covariance_matrix(panel)
        assert cov.values[0, 1] == pytest.approx(1.0, abs=1e-12)

    def test_matches_summation_oracle(self):
        rng = np.random.default_rng(1)
        values = rng.normal(size=(25, 2))
        panel = standardize(panel_from(values))
        cov = covariance_matrix(panel)
        expected = covariance_naive(panel.values[:, 0], panel.values[:, 1])
        assert cov.values[0, 1] == pytest.approx(expected, abs=1e-12)

    def test_requires_standardized(self, std_panel):
        raw = ReturnPanel(std_panel.dates, std_panel.currencies, std_panel.values, standardized=False)
        with pytest.raises(ValueError, match="standardised"):
            covariance_matrix(raw)

    def test_insufficient_rows(self):
        panel = panel_from(np.array([[1.0, 2.0], [2.0, 1.0]]), standardized=True)
        with pytest.raises(InsufficientDataError):
            covariance_matrix(panel)

    def test_exact_symmetry(self, std_panel):
        cov = covariance_matrix(std_panel)
        assert (cov.values == cov.values.T).all()


class TestSpearman:
    def test_monotone_map_gives_one(self):
        rng = np.random.default_rng(2)
        col = rng.normal(size=40)
        panel = panel_from(np.column_stack([col, col**3]))
        rho = spearman_matrix(panel)
        assert rho.values[0, 1] == 1.0

    def test_negation_gives_minus_one(self):
        rng = np.random.default_rng(3)
        col = rng.normal(size=40)
        rho = spearman_matrix(panel_from(np.column_stack([col, -col])))
        assert rho.values[0, 1] == -1.0

    def test_ties_match_average_rank_oracle(self):
        x = np.array([1.0, 2.0, 2.0, 3.0, 3.0, 3.0, 4.0, 1.0])
        y = np.array([2.0, 1.0, 4.0, 4.0, 2.0, 5.0, 6.0, 2.0])
        rho = spearman_matrix(panel_from(np.column_stack([x, y])))
        assert rho.values[0, 1] == pytest.approx(spearman_naive(x, y), abs=1e-12)

    def test_constant_column_named(self):
        panel = panel_from(np.column_stack([np.ones(10), np.arange(10.0)]), codes=("FLAT", "UP"))
        with pytest.raises(UndefinedCorrelationError, match="FLAT"):
            spearman_matrix(panel)


class TestCrossCorrelation:
    def test_lagged_copy_hits_one(self):
        rng = np.random.default_rng(4)
        a = rng.normal(size=50)
        b = np.roll(a, 1)  # b lags a by one step
        panel = panel_from(np.column_stack([a[1:], b[1:]]))
        xc = cross_correlation_matrix(panel, max_lag=1)
        assert xc.values[0, 1] == pytest.approx(1.0, abs=1e-12)

    def test_zero_lag_equals_pearson(self, std_panel):
        xc = cross_correlation_matrix(std_panel, max_lag=0)
        pearson = pearson_matrix(std_panel)
        assert xc.values == pytest.approx(pearson.values, abs=1e-12)

    def test_abs_nondecreasing_in_max_lag(self, std_panel):
        prev = np.abs(cross_correlation_matrix(std_panel, max_lag=0).values)
        for lag in (1, 2, 3):
            cur = np.abs(cross_correlation_matrix(std_panel, max_lag=lag).values)
            assert (cur >= prev - 1e-12).all()
            prev = cur

    def test_affine_invariance(self, std_panel):
        base = cross_correlation_matrix(std_panel, max_lag=1)
        shifted = ReturnPanel(
            std_panel.dates,
            std_panel.currencies,
            std_panel.values * np.array([2.0, 5.0, 0.3]) + np.array([1.0, -2.0, 0.5]),
        )
        transformed = cross_correlation_matrix(shifted, max_lag=1)
        assert transformed.values == pytest.approx(base.values, abs=1e-9)

    def test_diagonal_and_symmetry(self, std_panel):
        xc = cross_correlation_matrix(std_panel, max_lag=2)
        assert (np.diag(xc.values) == 1.0).all()
        assert (xc.values == xc.values.T).all()


class TestVariance:
    def test_standardized_unit_variance(self, std_panel):
        for v in variance_summary(std_panel).values():
            assert v == pytest.approx(1.0, abs=1e-9)

    def test_closed_form(self):
        panel = panel_from(np.array([[0.0], [2.0]]))
        assert variance_summary(panel)["C0"] == pytest.approx(2.0)

    def test_matches_summation_oracle(self):
        rng = np.random.default_rng(5)
        values = rng.normal(size=(33, 1))
        panel = panel_from(values)
        col = values[:, 0]
        expected = covariance_naive(col, col)
        assert variance_summary(panel)["C0"] == pytest.approx(expected, abs=1e-12)


class TestStl:
    def test_sine_recovery(self):
        t = np.arange(144)
        sine = np.sin(2 * np.pi * t / 12)
        decomp = stl_decompose(sine, 12)
        assert np.abs(decomp.seasonal - sine).max() < 0.05
        assert np.abs(decomp.trend).max() < 0.05

    def test_ramp_recovery(self):
        t = np.arange(144)
        ramp = 0.05 * t
        decomp = stl_decompose(ramp, 12)
        interior = slice(12, -12)
        assert np.abs((decomp.trend - ramp)[interior]).max() < 0.05
        assert np.abs(decomp.seasonal[interior]).max() < 0.05

    def test_additive_identity(self, std_panel):
        for col in range(3):
            series = std_panel.values[:, col]
            decomp = stl_decompose(series, 12)
            assert np.abs(decomp.reconstruct() - series).max() < 1e-8

    def test_deterministic_fixture_small_residual(self):
        t = np.arange(180)
        x = np.sin(2 * np.pi * t / 12) + 0.02 * t
        decomp = stl_decompose(x, 12)
        assert decomp.residual.var() < 0.01 * x.var()

    def test_seasonal_window_sums_near_zero(self):
        t = np.arange(144)
        x = np.sin(2 * np.pi * t / 12) + 0.01 * t
        decomp = stl_decompose(x, 12)
        amplitude = np.abs(decomp.seasonal).max()
        for start in range(len(x) - 12):
            assert abs(decomp.seasonal[start : start + 12].sum()) < 0.05 * 12 * amplitude

    def test_too_short_series(self):
        with pytest.raises(InsufficientDataError):
            stl_decompose(np.arange(20.0), 12)


class TestSerialization:
    def test_matrix_csv_roundtrip(self, tmp_path, std_panel):
        cov = covariance_matrix(std_panel)
        path = tmp_path / "cov.csv"
        write_matrix_csv(cov, path)
        back = read_matrix_csv(path)
        assert back.labels == cov.labels
        assert (back.values == cov.values).all()

    def test_matrix_json(self, std_panel):
        import json

        cov = covariance_matrix(std_panel)
        doc = json.loads(matrix_to_json(cov))
        assert doc["labels"] == list(cov.labels)
        assert np.array(doc["values"]) == pytest.approx(cov.values)

    def test_from_upper_enforces_symmetry(self):
        raw = np.array([[1.0, 0.5], [0.2, 1.0]])
        sym = SymmetricMatrix.from_upper(("A", "B"), raw)
        assert sym.values[1, 0] == 0.5
