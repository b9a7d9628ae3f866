"""End-to-end orchestration: ingest -> statistical branch -> topological
branch -> clustering -> evaluation, written as a deterministic report
tree of CSVs (plots are rendered from those CSVs afterwards).

Both branches consume the same in-memory standardised panel, so the
four models are compared under identical preprocessing.
"""

from __future__ import annotations

import csv
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cluster, evaluate, ingest, stats, summaries
from .config import PipelineConfig, SensitivityCase
from .embedding import DistanceMatrix, delay_embed, pairwise_distances, pca_project
from .persistence import PersistenceDiagram, rips_persistence, write_diagrams_csv

__all__ = ["PipelineError", "PipelineResult", "run_pipeline", "run_sensitivity", "load_returns"]


class PipelineError(RuntimeError):
    """Failure wrapped with the stage (and currency, if any) it came from."""

    def __init__(self, stage: str, cause: Exception, currency: str | None = None):
        self.stage = stage
        self.currency = currency
        where = f"{stage} [{currency}]" if currency else stage
        super().__init__(f"{where}: {type(cause).__name__}: {cause}")
        self.__cause__ = cause


@dataclass
class PipelineResult:
    """In-memory handles to everything the run wrote out."""

    output_dir: Path
    standardized: ingest.ReturnPanel
    diagrams: dict[str, list[PersistenceDiagram]]
    wasserstein: DistanceMatrix
    assignments: dict[tuple[str, str], cluster.ClusterAssignment]
    report: evaluate.EvaluationReport


def load_returns(config: PipelineConfig) -> tuple[ingest.RatePanel, ingest.ReturnPanel, ingest.ReturnPanel]:
    """Ingest stage: (monthly rates, raw returns, standardised returns)."""
    path = Path(config.data_path)
    if path.is_file():
        with open(path, "rb") as fh:
            panels = ingest.read_wide_csv(
                fh,
                config.currencies,
                delimiter=config.delimiter,
                date_column=config.wide_date_column,
                date_format=config.date_format,
            )
    elif path.is_dir():
        panels = []
        for code in config.currencies:
            source = path / f"{code}.csv"
            if not source.exists():
                raise FileNotFoundError(f"no rate file for {code}: {source}")
            with open(source, "rb") as fh:
                panels.append(
                    ingest.parse_rate_csv(
                        fh,
                        code,
                        delimiter=config.delimiter,
                        date_column=config.date_column,
                        rate_column=config.rate_column,
                        date_format=config.date_format,
                    )
                )
    else:
        raise FileNotFoundError(f"data path does not exist: {path}")

    merged = ingest.merge_and_interpolate(panels)
    if config.start is not None or config.end is not None:
        lo = np.datetime64(config.start, "D") if config.start else merged.dates[0]
        hi = np.datetime64(config.end, "D") if config.end else merged.dates[-1]
        keep = (merged.dates >= lo) & (merged.dates <= hi)
        merged = ingest.RatePanel(merged.dates[keep], merged.currencies, merged.values[keep])
    monthly = ingest.resample_monthly(merged, rule=config.monthly_rule)
    returns = ingest.log_returns(monthly)
    standardized = ingest.standardize(returns)
    return monthly, returns, standardized


def _resolve_eps(dist: DistanceMatrix, eps_max: float | str, scale: float = 1.0) -> float:
    base = dist.max_distance() if eps_max == "auto" else float(eps_max)
    return base * scale


def _currency_diagrams(
    panel: ingest.ReturnPanel,
    window: int,
    delay: int,
    eps_max: float | str,
    eps_scale: float = 1.0,
    threads: int = 1,
) -> dict[str, list[PersistenceDiagram]]:
    def job(code: str) -> list[PersistenceDiagram]:
        try:
            cloud = delay_embed(panel.column(code), window, delay, label=code)
            dist = pairwise_distances(cloud)
            return rips_persistence(dist, max_dim=1, eps_max=_resolve_eps(dist, eps_max, eps_scale))
        except Exception as exc:
            raise PipelineError("persistence", exc, currency=code) from exc

    codes = list(panel.currencies)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, codes))
    else:
        results = [job(code) for code in codes]
    return dict(zip(codes, results))


def _euclidean_distances(labels, points: np.ndarray) -> DistanceMatrix:
    diff = points[:, None, :] - points[None, :, :]
    values = np.sqrt((diff**2).sum(axis=2))
    i, j = np.triu_indices(len(points), k=1)
    values[j, i] = values[i, j]
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(tuple(labels), values)


def _statistical_distances(panel: ingest.ReturnPanel) -> DistanceMatrix:
    """Euclidean distances between the standardised return histories."""
    return _euclidean_distances(panel.currencies, panel.values.T)


def _write_coords_csv(path, labels, coords: np.ndarray, prefix: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["currency", *(f"{prefix}{i + 1}" for i in range(coords.shape[1]))])
        for name, row in zip(labels, coords):
            writer.writerow([name, *(repr(float(v)) for v in row)])


def _write_elbow_csv(path, curve) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "wcss"])
        for k, wcss in curve:
            writer.writerow([k, repr(float(wcss))])


def _write_variance_csv(path, variances: dict[str, float]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["currency", "variance"])
        for code, v in variances.items():
            writer.writerow([code, repr(v)])


def run_pipeline(config: PipelineConfig, *, render: bool = True) -> PipelineResult:
    """Execute the full comparison and write the report tree.

    The output directory must be new or empty; partial outputs are
    removed if any stage fails.  Identical config and data give
    byte-identical CSVs regardless of the thread count.
    """
    config.validate()
    out = Path(config.output_dir)
    if out.exists() and any(out.iterdir()):
        raise PipelineError("setup", FileExistsError(f"output directory {out} is not empty"))
    created = not out.exists()
    out.mkdir(parents=True, exist_ok=True)
    try:
        return _run_pipeline_inner(config, out, render)
    except BaseException:
        if created:
            shutil.rmtree(out, ignore_errors=True)
        else:
            for child in out.iterdir():
                shutil.rmtree(child, ignore_errors=True) if child.is_dir() else child.unlink()
        raise


def _run_pipeline_inner(config: PipelineConfig, out: Path, render: bool) -> PipelineResult:
    for sub in ("panels", "stats", "stats/stl", "tda", "tda/diagrams", "tda/barcodes",
                "tda/landscapes", "tda/betti", "clusters", "eval"):
        (out / sub).mkdir(parents=True, exist_ok=True)

    try:
        monthly, returns, standardized = load_returns(config)
    except Exception as exc:
        raise PipelineError("ingest", exc) from exc
    ingest.write_panel_csv(monthly, out / "panels" / "monthly_rates.csv")
    ingest.write_panel_csv(returns, out / "panels" / "log_returns.csv")
    ingest.write_panel_csv(standardized, out / "panels" / "standardized_returns.csv")

    # -- statistical branch ------------------------------------------------
    try:
        cov = stats.covariance_matrix(standardized)
        pearson = stats.pearson_matrix(standardized)
        spearman = stats.spearman_matrix(standardized)
        xcorr = stats.cross_correlation_matrix(standardized, config.max_lag)
        variances = stats.variance_summary(returns)
        stats.write_matrix_csv(cov, out / "stats" / "covariance.csv")
        stats.write_matrix_csv(pearson, out / "stats" / "pearson.csv")
        stats.write_matrix_csv(spearman, out / "stats" / "spearman.csv")
        stats.write_matrix_csv(xcorr, out / "stats" / "cross_correlation.csv")
        _write_variance_csv(out / "stats" / "variance.csv", variances)
    except Exception as exc:
        raise PipelineError("stats", exc) from exc
    for code in standardized.currencies:
        try:
            if standardized.n_rows >= 2 * config.stl_period:
                decomp = stats.stl_decompose(standardized.column(code), config.stl_period)
                stats.write_stl_csv(decomp, out / "stats" / "stl" / f"{code}.csv")
        except Exception as exc:
            raise PipelineError("stl", exc, currency=code) from exc

    # -- topological branch ------------------------------------------------
    try:
        diagrams = _currency_diagrams(
            standardized, config.embed_window, config.embed_delay, config.eps_max, threads=config.threads
        )
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError("persistence", exc) from exc

    landscape_rows = []
    grid_max = max(d[0].eps_max for d in diagrams.values())
    manifest_rows = []
    for code, dgms in diagrams.items():
        try:
            write_diagrams_csv(dgms, out / "tda" / "diagrams" / f"{code}.csv")
            manifest_rows.append((code, f"diagrams/{code}.csv", f"diagrams/{code}.svg"))
            row_parts = []
            for dgm in dgms:
                ls = summaries.landscape(dgm, config.landscape_layers, config.grid_size, grid_max=grid_max)
                bc = summaries.betti_curve(dgm, config.grid_size, grid_max=grid_max)
                summaries.write_landscape_csv(ls, out / "tda" / "landscapes" / f"{code}_h{dgm.dimension}.csv")
                summaries.write_betti_csv(bc, out / "tda" / "betti" / f"{code}_h{dgm.dimension}.csv")
                row_parts.append(ls.layers.ravel())
            landscape_rows.append(np.concatenate(row_parts))
        except Exception as exc:
            raise PipelineError("summaries", exc, currency=code) from exc
    with open(out / "tda" / "manifest.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["currency", "diagram_csv", "diagram_svg"])
        writer.writerows(manifest_rows)

    try:
        wmatrix = summaries.diagram_distance_matrix(
            diagrams,
            config.wasserstein_p,
            config.wasserstein_q,
            config.dim_weights,
            max_workers=config.threads,
        )
        stats.write_matrix_csv(
            stats.SymmetricMatrix(wmatrix.labels, wmatrix.values), out / "tda" / "wasserstein.csv"
        )
    except Exception as exc:
        raise PipelineError("wasserstein", exc) from exc

    try:
        pca_coords, pca_ratios = pca_project(np.vstack(landscape_rows), out_dim=2)
        _write_coords_csv(out / "tda" / "pca_projection.csv", list(diagrams), pca_coords, "pc")
        with open(out / "tda" / "pca_explained_variance.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["component", "explained_variance_ratio"])
            for i, ratio in enumerate(pca_ratios, start=1):
                writer.writerow([i, repr(float(ratio))])
    except Exception as exc:
        raise PipelineError("pca", exc) from exc

    # -- clustering ----------------------------------------------------------
    try:
        stat_vectors = standardized.values.T
        stat_dist = _statistical_distances(standardized)
        mds_cloud, mds_fractions = cluster.classical_mds(wmatrix, out_dim=min(config.mds_dim, wmatrix.n - 1))
        _write_coords_csv(out / "tda" / "mds_embedding.csv", wmatrix.labels, mds_cloud.points, "dim")

        km_stat = cluster.kmeans(
            stat_vectors, config.k, config.seed, standardized.currencies, feature_space="statistical"
        )
        dendro_stat, hc_stat = cluster.hierarchical_complete(stat_dist, config.k, feature_space="statistical")
        km_tda = cluster.kmeans(
            mds_cloud.points, config.k, config.seed, wmatrix.labels, feature_space="tda"
        )
        dendro_tda, hc_tda = cluster.hierarchical_complete(wmatrix, config.k, feature_space="tda")
        elbow = cluster.elbow_curve(stat_vectors, min(config.k_max_elbow, len(stat_vectors)), config.seed)

        cluster.write_assignment_csv(km_stat, out / "clusters" / "kmeans_statistical.csv")
        cluster.write_assignment_csv(hc_stat, out / "clusters" / "hierarchical_statistical.csv")
        cluster.write_assignment_csv(km_tda, out / "clusters" / "kmeans_tda.csv")
        cluster.write_assignment_csv(hc_tda, out / "clusters" / "hierarchical_tda.csv")
        cluster.write_dendrogram_csv(dendro_stat, out / "clusters" / "dendrogram_statistical.csv")
        cluster.write_dendrogram_csv(dendro_tda, out / "clusters" / "dendrogram_tda.csv")
        _write_elbow_csv(out / "clusters" / "elbow.csv", elbow)
        with open(out / "tda" / "mds_explained_variance.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["component", "fraction_of_positive_mass"])
            for i, frac in enumerate(mds_fractions, start=1):
                writer.writerow([i, repr(float(frac))])
    except Exception as exc:
        raise PipelineError("clustering", exc) from exc

    # -- evaluation ----------------------------------------------------------
    try:
        mds_dist = _euclidean_distances(wmatrix.labels, mds_cloud.points)
        rows = [
            evaluate.ModelScore(
                "kmeans", "statistical", config.k,
                evaluate.silhouette(stat_dist, km_stat),
                evaluate.calinski_harabasz(stat_vectors, km_stat.vector(standardized.currencies)),
            ),
            evaluate.ModelScore(
                "hierarchical", "statistical", config.k,
                evaluate.silhouette(stat_dist, hc_stat),
                evaluate.calinski_harabasz(stat_vectors, hc_stat.vector(standardized.currencies)),
            ),
            evaluate.ModelScore(
                "kmeans", "tda", config.k,
                evaluate.silhouette(mds_dist, km_tda),
                evaluate.calinski_harabasz(mds_cloud.points, km_tda.vector(wmatrix.labels)),
                note="silhouette and CH on the MDS embedding",
            ),
            evaluate.ModelScore(
                "hierarchical", "tda", config.k,
                evaluate.silhouette(wmatrix, hc_tda),
                evaluate.calinski_harabasz(mds_cloud.points, hc_tda.vector(wmatrix.labels)),
                note="silhouette on the Wasserstein matrix; CH on the MDS embedding",
            ),
        ]
        report = evaluate.EvaluationReport(tuple(rows))
        report.to_csv(out / "eval" / "evaluation_report.csv")
        with open(out / "eval" / "evaluation_report.json", "w") as fh:
            fh.write(report.to_json())
    except Exception as exc:
        raise PipelineError("evaluation", exc) from exc

    if render:
        from . import plots

        try:
            plots.render_plots(out)
        except Exception as exc:
            raise PipelineError("plots", exc) from exc

    assignments = {
        ("kmeans", "statistical"): km_stat,
        ("hierarchical", "statistical"): hc_stat,
        ("kmeans", "tda"): km_tda,
        ("hierarchical", "tda"): hc_tda,
    }
    return PipelineResult(out, standardized, diagrams, wmatrix, assignments, report)


def _case_params(config: PipelineConfig, case: SensitivityCase) -> tuple[int, int, float | str, float]:
    window = case.window if case.window is not None else config.embed_window
    delay = case.delay if case.delay is not None else config.embed_delay
    eps = case.eps_max if case.eps_max is not None else config.eps_max
    return window, delay, eps, case.eps_scale


def _tda_assignment(panel, window, delay, eps, scale, config) -> tuple[DistanceMatrix, cluster.ClusterAssignment]:
    diagrams = _currency_diagrams(panel, window, delay, eps, scale, threads=config.threads)
    wmatrix = summaries.diagram_distance_matrix(
        diagrams, config.wasserstein_p, config.wasserstein_q, config.dim_weights,
        max_workers=config.threads,
    )
    _, assignment = cluster.hierarchical_complete(wmatrix, config.k, feature_space="tda")
    return wmatrix, assignment


def run_sensitivity(config: PipelineConfig) -> evaluate.SensitivityReport:
    """Recompute the TDA branch across the parameter grid and score each
    variation against the baseline run.

    The baseline row (the config's own window/delay/eps) is emitted
    first with all metrics exactly 1; grid rows that fail (e.g. a series
    too short to embed) are recorded with the error and skipped.
    """
    config.validate()
    if not config.sensitivity_grid:
        raise ValueError("sensitivity grid is empty")
    try:
        _, _, standardized = load_returns(config)
    except Exception as exc:
        raise PipelineError("ingest", exc) from exc

    base_name = f"baseline (d={config.embed_window}, tau={config.embed_delay})"
    base_matrix, base_assignment = _tda_assignment(
        standardized, config.embed_window, config.embed_delay, config.eps_max, 1.0, config
    )
    order = list(standardized.currencies)
    rows = [
        evaluate.SensitivityRow(
            base_name,
            evaluate.mantel(base_matrix, base_matrix),
            evaluate.adjusted_rand(base_assignment.vector(order), base_assignment.vector(order)),
            evaluate.nmi(base_assignment.vector(order), base_assignment.vector(order)),
        )
    ]
    for case in config.sensitivity_grid:
        window, delay, eps, scale = _case_params(config, case)
        try:
            matrix, assignment = _tda_assignment(standardized, window, delay, eps, scale, config)
            rows.append(
                evaluate.SensitivityRow(
                    case.name,
                    evaluate.mantel(base_matrix, matrix),
                    evaluate.adjusted_rand(base_assignment.vector(order), assignment.vector(order)),
                    evaluate.nmi(base_assignment.vector(order), assignment.vector(order)),
                )
            )
        except Exception as exc:
            rows.append(
                evaluate.SensitivityRow(case.name, float("nan"), float("nan"), float("nan"), error=str(exc))
            )
    return evaluate.SensitivityReport(base_name, tuple(rows))
