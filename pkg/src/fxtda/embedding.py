"""Delay embedding of return series into point clouds, plus the
Euclidean geometry helpers (pairwise distances, PCA projection) used by
the topological branch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

__all__ = [
    "PointCloud",
    "DistanceMatrix",
    "EmbeddingError",
    "delay_embed",
    "pairwise_distances",
    "pca_project",
]


class EmbeddingError(ValueError):
    """Series too short for the requested window/delay."""


@dataclass(frozen=True)
class PointCloud:
    """n x d matrix of embedded points.

    ``embed_window``/``embed_delay`` record the sliding-window
    parameters when the cloud came from :func:`delay_embed`.
    """

    points: np.ndarray
    source_label: str = ""
    embed_window: int | None = None
    embed_delay: int | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-D array")
        if not np.isfinite(pts).all():
            raise ValueError("points contain non-finite coordinates")
        object.__setattr__(self, "points", pts)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative matrix with zero diagonal."""

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        n = len(self.labels)
        if vals.shape != (n, n):
            raise ValueError(f"distance matrix shape {vals.shape} does not match {n} labels")
        if not (vals == vals.T).all():
            raise ValueError("distance matrix is not exactly symmetric")
        if (vals < 0).any():
            raise ValueError("distances must be nonnegative")
        if np.diag(vals).any():
            raise ValueError("distance matrix diagonal must be zero")

    @classmethod
    def from_condensed(cls, labels, condensed: np.ndarray) -> "DistanceMatrix":
        return cls(tuple(labels), squareform(condensed, checks=False))

    @property
    def n(self) -> int:
        return len(self.labels)

    def max_distance(self) -> float:
        return float(self.values.max()) if self.n > 1 else 0.0


def delay_embed(series: np.ndarray, window: int, delay: int, label: str = "") -> PointCloud:
    """Sliding-window embedding of a scalar series into R^window.

    Point t is ``(x_t, x_{t-delay}, ..., x_{t-(window-1)*delay})``, so a
    series of length T yields ``T - (window-1)*delay`` points.
    """
    series = np.asarray(series, dtype=float)
    if series.ndim != 1:
        raise EmbeddingError("delay_embed expects a 1-D series")
    if window < 1 or delay < 1:
        raise EmbeddingError("window and delay must be >= 1")
    span = (window - 1) * delay
    if len(series) <= span:
        raise EmbeddingError(
            f"series of length {len(series)} too short for window={window}, "
            f"delay={delay} (needs > {span})"
        )
    n = len(series) - span
    idx = span + np.arange(n)[:, None] - np.arange(window)[None, :] * delay
    return PointCloud(series[idx], source_label=label, embed_window=window, embed_delay=delay)


def pairwise_distances(cloud: PointCloud) -> DistanceMatrix:
    """Euclidean distances, each pair computed once and mirrored."""
    if cloud.n_points < 2:
        raise ValueError("need at least two points")
    labels = tuple(str(i) for i in range(cloud.n_points))
    return DistanceMatrix.from_condensed(labels, pdist(cloud.points, metric="euclidean"))


def pca_project(feature_rows: np.ndarray, out_dim: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Centre rows and project onto the top principal components.

    Returns the projected coordinates and the explained-variance ratio
    of each retained component.  Component signs are fixed so the
    largest-magnitude loading is positive, which keeps reruns
    deterministic.
    """
    rows = np.asarray(feature_rows, dtype=float)
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise ValueError("need at least two feature rows")
    if out_dim < 1 or out_dim > min(rows.shape[0] - 1, rows.shape[1]):
        raise ValueError(
            f"out_dim must be in [1, {min(rows.shape[0] - 1, rows.shape[1])}]"
        )
    centred = rows - rows.mean(axis=0)
    u, s, vt = np.linalg.svd(centred, full_matrices=False)
    # Deterministic sign: flip components whose extreme loading is negative.
    for c in range(vt.shape[0]):
        pivot = np.argmax(np.abs(vt[c]))
        if vt[c, pivot] < 0:
            vt[c] = -vt[c]
            u[:, c] = -u[:, c]
    coords = u[:, :out_dim] * s[:out_dim]
    total = float((s**2).sum())
    if total == 0.0:
        ratios = np.zeros(out_dim)
    else:
        ratios = (s[:out_dim] ** 2) / total
    return coords, ratios
