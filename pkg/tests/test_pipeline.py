import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest
import yaml
from click.testing import CliRunner

from fxtda.cli import main as cli_main
from fxtda.config import ConfigError, PipelineConfig, write_default_config
from fxtda.ingest import read_panel_csv
from fxtda.persistence import read_diagrams_csv
from fxtda.pipeline import PipelineError, load_returns, run_pipeline, run_sensitivity
from fxtda.stats import read_matrix_csv
from conftest import TEST_CURRENCIES


@pytest.fixture(scope="session")
def pipeline_result(pipeline_config, tmp_path_factory):
    out = tmp_path_factory.mktemp("report")
    config = pipeline_config.with_overrides(output_dir=out / "run")
    return run_pipeline(config)


def tree_csv_bytes(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*.csv"))}


class TestConfig:
    def test_defaults_validate(self):
        PipelineConfig().validate()

    def test_yaml_roundtrip(self, tmp_path):
        path = tmp_path / "config.yaml"
        write_default_config(path)
        config = PipelineConfig.from_yaml(path)
        assert config.embed_window == 4 and config.embed_delay == 1
        assert config.k == 3
        assert len(config.sensitivity_grid) == 6

    def test_rejects_eur(self):
        with pytest.raises(ConfigError, match="EUR"):
            PipelineConfig(currencies=("USD", "EUR")).validate()

    def test_rejects_bad_eps(self):
        with pytest.raises(ConfigError):
            PipelineConfig(eps_max=-2.0).validate()
        with pytest.raises(ConfigError):
            PipelineConfig(eps_max="huge").validate()

    def test_rejects_unknown_keys(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("tda:\n  epsilon: 3\n")
        with pytest.raises(ConfigError, match="epsilon"):
            PipelineConfig.from_yaml(path)

    def test_sensitivity_entries_limited_to_embedding_params(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("sensitivity:\n  - {name: x, k: 5}\n")
        with pytest.raises(ConfigError, match="window/delay/eps_max"):
            PipelineConfig.from_yaml(path)

    def test_date_parsing(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("data:\n  start: 2001-02-03\n  end: '2004-05-06'\n")
        config = PipelineConfig.from_yaml(path)
        assert str(config.start) == "2001-02-03"
        assert str(config.end) == "2004-05-06"


class TestIngestStage:
    def test_standardized_panel_moments(self, pipeline_config):
        _, returns, standardized = load_returns(pipeline_config)
        assert standardized.standardized
        assert standardized.values.mean(axis=0) == pytest.approx(np.zeros(6), abs=1e-9)
        assert standardized.values.std(axis=0, ddof=1) == pytest.approx(np.ones(6), abs=1e-9)
        assert returns.n_rows == standardized.n_rows

    def test_date_range_restriction(self, pipeline_config):
        clipped = pipeline_config.with_overrides(
            start=__import__("datetime").date(2001, 1, 1),
            end=__import__("datetime").date(2003, 12, 31),
        )
        monthly, _, _ = load_returns(clipped)
        assert monthly.dates[0] >= np.datetime64("2001-01-01")
        assert monthly.dates[-1] <= np.datetime64("2003-12-31")


class TestPipelineRun:
    EXPECTED_CSVS = [
        "panels/monthly_rates.csv",
        "panels/log_returns.csv",
        "panels/standardized_returns.csv",
        "stats/covariance.csv",
        "stats/pearson.csv",
        "stats/spearman.csv",
        "stats/cross_correlation.csv",
        "stats/variance.csv",
        "tda/wasserstein.csv",
        "tda/pca_projection.csv",
        "tda/mds_embedding.csv",
        "tda/manifest.csv",
        "clusters/kmeans_statistical.csv",
        "clusters/hierarchical_statistical.csv",
        "clusters/kmeans_tda.csv",
        "clusters/hierarchical_tda.csv",
        "clusters/dendrogram_statistical.csv",
        "clusters/dendrogram_tda.csv",
        "clusters/elbow.csv",
        "eval/evaluation_report.csv",
    ]

    def test_report_tree_complete(self, pipeline_result):
        out = pipeline_result.output_dir
        for rel in self.EXPECTED_CSVS:
            assert (out / rel).exists(), rel
        for code in TEST_CURRENCIES:
            assert (out / "tda" / "diagrams" / f"{code}.csv").exists()
            for dim in (0, 1):
                assert (out / "tda" / "landscapes" / f"{code}_h{dim}.csv").exists()
                assert (out / "tda" / "betti" / f"{code}_h{dim}.csv").exists()

    def test_four_eval_rows_cover_model_grid(self, pipeline_result):
        rows = pipeline_result.report.rows
        assert len(rows) == 4
        assert {(r.method, r.feature_space) for r in rows} == {
            ("kmeans", "statistical"),
            ("hierarchical", "statistical"),
            ("kmeans", "tda"),
            ("hierarchical", "tda"),
        }
        for row in rows:
            assert -1.0 <= row.silhouette <= 1.0
            assert row.calinski_harabasz >= 0.0

    def test_emitted_csvs_parse_back(self, pipeline_result):
        out = pipeline_result.output_dir
        panel = read_panel_csv(out / "panels" / "standardized_returns.csv", returns=True, standardized=True)
        assert panel.currencies == TEST_CURRENCIES
        cov = read_matrix_csv(out / "stats" / "covariance.csv")
        assert cov.labels == TEST_CURRENCIES
        wasserstein = read_matrix_csv(out / "tda" / "wasserstein.csv")
        assert (wasserstein.values >= 0.0).all()
        diagrams = read_diagrams_csv(out / "tda" / "diagrams" / "AAA.csv")
        assert [d.dimension for d in diagrams] == [0, 1]

    def test_diagram_row_count_matches_embedding(self, pipeline_result):
        h0 = pipeline_result.diagrams["AAA"][0]
        n_points = pipeline_result.standardized.n_rows - 3  # (window-1)*delay = 3
        assert len(h0.pairs) == n_points

    def test_elbow_non_increasing(self, pipeline_result):
        rows = (pipeline_result.output_dir / "clusters" / "elbow.csv").read_text().strip().splitlines()[1:]
        wcss = [float(r.split(",")[1]) for r in rows]
        assert all(b <= a + 1e-12 for a, b in zip(wcss, wcss[1:]))

    def test_svgs_well_formed(self, pipeline_result):
        svgs = list(pipeline_result.output_dir.rglob("*.svg"))
        assert len(svgs) > 20
        for svg in svgs:
            root = ET.parse(svg).getroot()
            assert root.tag.endswith("svg")

    def test_refuses_nonempty_output_dir(self, pipeline_result, pipeline_config):
        with pytest.raises(PipelineError, match="setup"):
            run_pipeline(pipeline_config.with_overrides(output_dir=pipeline_result.output_dir))

    def test_failure_removes_partial_outputs(self, tmp_path, pipeline_config):
        out = tmp_path / "doomed"
        bad = pipeline_config.with_overrides(
            output_dir=out,
            embed_window=10_000,  # every series too short to embed
        )
        with pytest.raises(PipelineError, match="persistence"):
            run_pipeline(bad)
        assert not out.exists()

    def test_error_carries_stage_and_currency(self, tmp_path, pipeline_config):
        bad = pipeline_config.with_overrides(output_dir=tmp_path / "x", embed_window=10_000)
        with pytest.raises(PipelineError, match=r"persistence \[AAA\]"):
            run_pipeline(bad)


class TestDeterminism:
    def test_bit_identical_csv_trees_across_runs_and_threads(self, pipeline_config, tmp_path):
        a = pipeline_config.with_overrides(output_dir=tmp_path / "a", threads=1)
        b = pipeline_config.with_overrides(output_dir=tmp_path / "b", threads=4)
        run_pipeline(a, render=False)
        run_pipeline(b, render=False)
        tree_a = tree_csv_bytes(tmp_path / "a")
        tree_b = tree_csv_bytes(tmp_path / "b")
        assert tree_a.keys() == tree_b.keys()
        for rel in tree_a:
            assert tree_a[rel] == tree_b[rel], f"CSV differs: {rel}"


class TestPaperScale:
    def test_wide_csv_pipeline_at_study_scale(self, tmp_path):
        """Full 13-currency run over the study's 2000-2022 span on a
        synthetic ECB-shaped wide file: exercises the exact code path
        the real reproduction uses, at the real problem size."""
        from fxtda.config import DEFAULT_CURRENCIES
        from fxtda.synthetic import write_synthetic_wide_csv

        wide = write_synthetic_wide_csv(tmp_path / "eurofxref-hist.csv", DEFAULT_CURRENCIES, seed=3)
        config = PipelineConfig(
            data_path=wide,
            output_dir=tmp_path / "paper_scale",
            threads=2,
            seed=5,
        )
        result = run_pipeline(config, render=False)
        assert result.standardized.n_rows == 266
        assert result.standardized.values.shape == (266, 13)
        h0 = result.diagrams["AUD"][0]
        assert len(h0.pairs) == 263  # 266 - (window-1)*delay
        assert result.wasserstein.values.shape == (13, 13)
        assert len(result.report.rows) == 4
        for row in result.report.rows:
            assert np.isfinite(row.silhouette) and np.isfinite(row.calinski_harabasz)


class TestSensitivity:
    def test_baseline_first_and_exact_ones(self, pipeline_config):
        config = pipeline_config.with_overrides(
            sensitivity_grid=(
                __import__("fxtda.config", fromlist=["SensitivityCase"]).SensitivityCase(
                    "same as baseline", window=4, delay=1
                ),
            )
        )
        report = run_sensitivity(config)
        assert len(report.rows) == 2
        assert report.rows[0].param_change.startswith("baseline")
        assert report.rows[0].mantel == pytest.approx(1.0, abs=1e-9)
        # identical parameters under a different name reproduce the baseline
        assert report.rows[1].mantel == pytest.approx(1.0, abs=1e-9)
        assert report.rows[1].ari == pytest.approx(1.0, abs=1e-9)
        assert report.rows[1].nmi == pytest.approx(1.0, abs=1e-9)

    def test_default_grid_layout(self, pipeline_config):
        report = run_sensitivity(pipeline_config)
        assert len(report.rows) == 7  # baseline + six variations
        names = [r.param_change for r in report.rows]
        assert names[0].startswith("baseline (d=4, tau=1)")
        assert "eps_max +25%" in names and "eps_max -25%" in names
        for row in report.rows:
            if not row.error:
                assert -1.0 <= row.mantel <= 1.0
                assert row.nmi <= 1.0 + 1e-9

    def test_error_row_recorded_and_run_continues(self, pipeline_config):
        from fxtda.config import SensitivityCase

        config = pipeline_config.with_overrides(
            sensitivity_grid=(
                SensitivityCase("way too wide", window=10_000, delay=1),
                SensitivityCase("fine", window=3, delay=1),
            )
        )
        report = run_sensitivity(config)
        assert len(report.rows) == 3
        assert report.rows[1].error != ""
        assert np.isnan(report.rows[1].mantel)
        assert report.rows[2].error == ""


class TestCli:
    def _write_config(self, tmp_path, data_dir, out_name="cli_out") -> Path:
        doc = {
            "data": {"path": str(data_dir), "currencies": list(TEST_CURRENCIES)},
            "cluster": {"k": 3, "seed": 11, "k_max_elbow": 4, "mds_dim": 4},
            "tda": {"grid_size": 40},
            "run": {"output_dir": str(tmp_path / out_name), "threads": 1},
            "sensitivity": [{"name": "d=3, tau=1", "window": 3, "delay": 1}],
        }
        path = tmp_path / "config.yaml"
        path.write_text(yaml.safe_dump(doc))
        return path

    def test_validate_config(self, tmp_path, synthetic_data_dir):
        config_path = self._write_config(tmp_path, synthetic_data_dir)
        result = CliRunner().invoke(cli_main, ["validate-config", "--config", str(config_path)])
        assert result.exit_code == 0, result.output
        assert "config OK" in result.output

    def test_validate_config_failure_exit_code(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("cluster:\n  k: 1\n")
        result = CliRunner().invoke(cli_main, ["validate-config", "--config", str(path)])
        assert result.exit_code == 1
        assert "error" in result.output

    def test_run_and_plot(self, tmp_path, synthetic_data_dir):
        config_path = self._write_config(tmp_path, synthetic_data_dir)
        runner = CliRunner()
        result = runner.invoke(cli_main, ["run", "--config", str(config_path)])
        assert result.exit_code == 0, result.output
        assert "report written" in result.output
        out_dir = tmp_path / "cli_out"
        assert (out_dir / "eval" / "evaluation_report.csv").exists()

        replot = runner.invoke(cli_main, ["plot", "--output", str(out_dir)])
        assert replot.exit_code == 0, replot.output
        assert "rendered" in replot.output

    def test_run_failure_has_stage_message(self, tmp_path):
        doc = {"data": {"path": str(tmp_path / "nowhere")}, "run": {"output_dir": str(tmp_path / "o")}}
        config_path = tmp_path / "config.yaml"
        config_path.write_text(yaml.safe_dump(doc))
        result = CliRunner().invoke(cli_main, ["run", "--config", str(config_path)])
        assert result.exit_code == 1
        assert "ingest" in result.output

    def test_sensitivity_command(self, tmp_path, synthetic_data_dir):
        config_path = self._write_config(tmp_path, synthetic_data_dir, out_name="sens_out")
        result = CliRunner().invoke(cli_main, ["sensitivity", "--config", str(config_path)])
        assert result.exit_code == 0, result.output
        report_path = tmp_path / "sens_out" / "eval" / "sensitivity_report.csv"
        assert report_path.exists()
        rows = report_path.read_text().strip().splitlines()
        assert rows[0] == "param_change,mantel,ari,nmi,error"
        assert len(rows) == 3  # header + baseline + one case


class TestRenderPlots:
    def test_missing_csv_named(self, tmp_path):
        from fxtda.plots import render_plots

        (tmp_path / "stats").mkdir()
        with pytest.raises(FileNotFoundError, match="covariance.csv"):
            render_plots(tmp_path)

    def test_heatmap_unit(self, tmp_path):
        from fxtda.plots import heatmap_svg

        out = tmp_path / "hm.svg"
        heatmap_svg(("a", "b"), np.array([[1.0, 0.2], [0.2, 1.0]]), out)
        root = ET.parse(out).getroot()
        assert root.tag.endswith("svg")

    def test_empty_diagram_svg(self, tmp_path):
        from fxtda.plots import diagram_svg

        out = tmp_path / "empty.svg"
        diagram_svg([], out, title="empty")
        root = ET.parse(out).getroot()
        assert root.tag.endswith("svg")
