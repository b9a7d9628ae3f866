"""SVG renderers for the report tree.

Every figure is re-derived from the CSVs the pipeline wrote, so plots
can be regenerated without recomputing anything.  SVG output keeps the
artifacts diffable; the matplotlib hash salt and stripped date metadata
make renders reproducible.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "fxtda"

import matplotlib.pyplot as plt
import numpy as np

from .stats import read_matrix_csv

__all__ = [
    "heatmap_svg",
    "line_svg",
    "scatter_svg",
    "diagram_svg",
    "barcode_svg",
    "dendrogram_svg",
    "render_plots",
]

_SAVE_KW = {"format": "svg", "metadata": {"Date": None}}


def _finish(fig, path) -> None:
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def heatmap_svg(labels, values: np.ndarray, path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(7, 6))
    im = ax.imshow(values, cmap="coolwarm")
    ax.set_xticks(range(len(labels)), labels, rotation=90, fontsize=7)
    ax.set_yticks(range(len(labels)), labels, fontsize=7)
    fig.colorbar(im, ax=ax, shrink=0.85)
    if title:
        ax.set_title(title)
    _finish(fig, path)


def line_svg(x, series: dict[str, np.ndarray], path, title: str = "", xlabel: str = "", ylabel: str = "") -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name, values in series.items():
        ax.plot(x, values, label=name, linewidth=1.2)
    if len(series) > 1:
        ax.legend(fontsize=8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    _finish(fig, path)


def scatter_svg(points: np.ndarray, labels, path, title: str = "", xlabel: str = "", ylabel: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6.5, 5.5))
    ax.scatter(points[:, 0], points[:, 1], s=28, color="#2b6cb0")
    for name, (x, y) in zip(labels, points):
        ax.annotate(name, (x, y), fontsize=8, xytext=(4, 4), textcoords="offset points")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    _finish(fig, path)


def diagram_svg(rows, path, title: str = "") -> None:
    """Persistence diagram scatter: H0 red, H1 blue, diagonal dashed.

    ``rows`` holds (dimension, birth, death, essential) tuples; an empty
    list still yields valid axes with the diagonal.
    """
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    top = max((d for _, _, d, _ in rows), default=1.0)
    top = top if top > 0 else 1.0
    pad = 0.05 * top
    ax.plot([0, top + pad], [0, top + pad], linestyle="--", color="grey", linewidth=1)
    colors = {0: "#d62728", 1: "#1f77b4"}
    for dim in sorted({r[0] for r in rows}):
        pts = [(b, d) for k, b, d, _ in rows if k == dim]
        ax.scatter(
            [b for b, _ in pts],
            [d for _, d in pts],
            s=22,
            color=colors.get(dim, "black"),
            label=f"H{dim}",
            alpha=0.8,
        )
    if rows:
        ax.legend(fontsize=8)
    ax.set_xlim(-pad, top + pad)
    ax.set_ylim(-pad, top + pad)
    ax.set_xlabel("birth")
    ax.set_ylabel("death")
    if title:
        ax.set_title(title)
    _finish(fig, path)


def barcode_svg(rows, path, title: str = "") -> None:
    """Interval plot of [birth, death) bars grouped by dimension."""
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    colors = {0: "#d62728", 1: "#1f77b4"}
    ordered = sorted(rows, key=lambda r: (r[0], r[1], -(r[2] - r[1])))
    for y, (dim, b, d, _) in enumerate(ordered):
        ax.hlines(y, b, d, color=colors.get(dim, "black"), linewidth=1.4)
    ax.set_yticks([])
    ax.set_xlabel("filtration scale")
    if title:
        ax.set_title(title)
    _finish(fig, path)


def dendrogram_svg(linkage: np.ndarray, leaf_labels, path, title: str = "") -> None:
    from scipy.cluster.hierarchy import dendrogram as scipy_dendrogram

    fig, ax = plt.subplots(figsize=(7, 4.5))
    scipy_dendrogram(linkage, labels=list(leaf_labels), ax=ax, leaf_font_size=8)
    ax.set_ylabel("linkage height")
    if title:
        ax.set_title(title)
    _finish(fig, path)


def _read_rows(path) -> list[list[str]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return [row for row in reader if row]


def _require(path: Path) -> Path:
    if not path.exists():
        raise FileNotFoundError(f"missing report CSV: {path}")
    return path


def render_plots(report_dir) -> list[Path]:
    """Render every figure type from an existing report tree.

    Returns the list of SVGs written.  Raises ``FileNotFoundError``
    naming the first missing CSV.
    """
    root = Path(report_dir)
    written: list[Path] = []

    def emit(path):
        written.append(Path(path))

    for name in ("covariance", "pearson", "spearman", "cross_correlation"):
        matrix = read_matrix_csv(_require(root / "stats" / f"{name}.csv"))
        out = root / "stats" / f"{name}.svg"
        heatmap_svg(matrix.labels, matrix.values, out, title=name.replace("_", " "))
        emit(out)

    wpath = _require(root / "tda" / "wasserstein.csv")
    wmatrix = read_matrix_csv(wpath)
    heatmap_svg(wmatrix.labels, wmatrix.values, root / "tda" / "wasserstein.svg", title="wasserstein distances")
    emit(root / "tda" / "wasserstein.svg")

    for dgm_csv in sorted((root / "tda" / "diagrams").glob("*.csv")):
        code = dgm_csv.stem
        rows = [(int(r[0]), float(r[1]), float(r[2]), bool(int(r[3]))) for r in _read_rows(dgm_csv)]
        diagram_svg(rows, root / "tda" / "diagrams" / f"{code}.svg", title=f"{code} persistence diagram")
        emit(root / "tda" / "diagrams" / f"{code}.svg")
        barcode_svg(rows, root / "tda" / "barcodes" / f"{code}.svg", title=f"{code} barcode")
        emit(root / "tda" / "barcodes" / f"{code}.svg")

    for ls_csv in sorted((root / "tda" / "landscapes").glob("*.csv")):
        rows = _read_rows(ls_csv)
        grid = np.array([float(r[0]) for r in rows])
        layers = {f"layer{i}": np.array([float(r[i]) for r in rows]) for i in range(1, len(rows[0]))}
        out = ls_csv.with_suffix(".svg")
        line_svg(grid, layers, out, title=f"{ls_csv.stem} landscape", xlabel="scale", ylabel="tent height")
        emit(out)

    for bc_csv in sorted((root / "tda" / "betti").glob("*.csv")):
        rows = _read_rows(bc_csv)
        grid = np.array([float(r[0]) for r in rows])
        counts = np.array([int(r[1]) for r in rows])
        out = bc_csv.with_suffix(".svg")
        line_svg(grid, {"betti": counts}, out, title=f"{bc_csv.stem} Betti curve", xlabel="scale", ylabel="alive classes")
        emit(out)

    pca_rows = _read_rows(_require(root / "tda" / "pca_projection.csv"))
    coords = np.array([[float(v) for v in r[1:3]] for r in pca_rows])
    scatter_svg(
        coords,
        [r[0] for r in pca_rows],
        root / "tda" / "pca_scatter.svg",
        title="PCA of stacked landscape features",
        xlabel="pc1",
        ylabel="pc2",
    )
    emit(root / "tda" / "pca_scatter.svg")

    elbow_rows = _read_rows(_require(root / "clusters" / "elbow.csv"))
    ks = np.array([int(r[0]) for r in elbow_rows])
    wcss = np.array([float(r[1]) for r in elbow_rows])
    line_svg(ks, {"wcss": wcss}, root / "clusters" / "elbow.svg", title="elbow curve", xlabel="k", ylabel="within-cluster SS")
    emit(root / "clusters" / "elbow.svg")

    # dendrogram leaves are the currency columns of the panel CSV header
    with open(_require(root / "panels" / "standardized_returns.csv"), newline="") as fh:
        leaf_labels = next(csv.reader(fh))[1:]
    for name in ("dendrogram_statistical", "dendrogram_tda"):
        rows = _read_rows(_require(root / "clusters" / f"{name}.csv"))
        linkage = np.array([[float(v) for v in r] for r in rows])
        out = root / "clusters" / f"{name}.svg"
        dendrogram_svg(linkage, leaf_labels, out, title=name.replace("_", " "))
        emit(out)

    return written
