"""Cluster-quality scores and partition/matrix agreement metrics.

Silhouette works on any precomputed distance matrix so each model can
be scored in its native geometry; Calinski-Harabasz needs a vector
space.  ARI, NMI, and the Mantel correlation drive the sensitivity
analysis.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cluster import ClusterAssignment
from .embedding import DistanceMatrix
from .stats import UndefinedCorrelationError

__all__ = [
    "EvaluationReport",
    "ModelScore",
    "SensitivityReport",
    "SensitivityRow",
    "UndefinedMetricError",
    "silhouette",
    "calinski_harabasz",
    "adjusted_rand",
    "nmi",
    "mantel",
]


class UndefinedMetricError(ValueError):
    """Metric undefined for the given partition (e.g. a single cluster)."""


def _label_vector(labels, order: Sequence[str] | None) -> np.ndarray:
    if isinstance(labels, ClusterAssignment):
        if order is None:
            order = list(labels.labels.keys())
        return labels.vector(order)
    return np.asarray(labels, dtype=int)


def silhouette(dist: DistanceMatrix, labels) -> float:
    """Mean silhouette coefficient over items.

    For item i with intra-cluster mean distance a and smallest
    other-cluster mean distance b, the score is (b - a) / max(a, b);
    members of singleton clusters contribute 0.
    """
    vec = _label_vector(labels, getattr(dist, "labels", None))
    values = dist.values
    n = len(vec)
    ids = np.unique(vec)
    if len(ids) < 2:
        raise UndefinedMetricError("silhouette needs at least two clusters")
    scores = np.empty(n)
    for i in range(n):
        own = vec[i]
        own_mask = vec == own
        if own_mask.sum() == 1:
            scores[i] = 0.0
            continue
        a = values[i, own_mask].sum() / (own_mask.sum() - 1)
        b = min(
            values[i, vec == other].mean()
            for other in ids
            if other != own
        )
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return float(scores.mean())


def calinski_harabasz(points: np.ndarray, labels) -> float:
    """Between/within scatter ratio scaled by degrees of freedom.

    Returns +inf (with a warning) when the within-cluster scatter is
    exactly zero.
    """
    points = np.asarray(points, dtype=float)
    vec = _label_vector(labels, None)
    n = len(points)
    ids = np.unique(vec)
    k = len(ids)
    if k < 2:
        raise UndefinedMetricError("calinski_harabasz needs at least two clusters")
    if n <= k:
        raise UndefinedMetricError("calinski_harabasz needs more items than clusters")
    global_mean = points.mean(axis=0)
    between = 0.0
    within = 0.0
    for cid in ids:
        cluster = points[vec == cid]
        centroid = cluster.mean(axis=0)
        between += len(cluster) * float(((centroid - global_mean) ** 2).sum())
        within += float(((cluster - centroid) ** 2).sum())
    if within == 0.0:
        warnings.warn("zero within-cluster scatter; Calinski-Harabasz is +inf", stacklevel=2)
        return math.inf
    return (between / (k - 1)) / (within / (n - k))


def _check_same_items(a, b) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(a, ClusterAssignment) and isinstance(b, ClusterAssignment):
        if set(a.labels) != set(b.labels):
            raise ValueError("partitions cover different item sets")
        order = list(a.labels.keys())
        return a.vector(order), b.vector(order)
    va, vb = np.asarray(a, dtype=int), np.asarray(b, dtype=int)
    if len(va) != len(vb):
        raise ValueError("partitions cover different item counts")
    return va, vb


def _contingency(va: np.ndarray, vb: np.ndarray) -> np.ndarray:
    ids_a, inv_a = np.unique(va, return_inverse=True)
    ids_b, inv_b = np.unique(vb, return_inverse=True)
    table = np.zeros((len(ids_a), len(ids_b)), dtype=np.int64)
    np.add.at(table, (inv_a, inv_b), 1)
    return table


def adjusted_rand(a, b) -> float:
    """Adjusted Rand Index via the contingency-table formula."""
    va, vb = _check_same_items(a, b)
    table = _contingency(va, vb)
    n = len(va)

    def comb2(x):
        return x * (x - 1) / 2.0

    sum_cells = comb2(table).sum()
    sum_rows = comb2(table.sum(axis=1)).sum()
    sum_cols = comb2(table.sum(axis=0)).sum()
    total = comb2(n)
    expected = sum_rows * sum_cols / total if total else 0.0
    max_index = (sum_rows + sum_cols) / 2.0
    if max_index == expected:
        return 1.0  # both partitions trivial; identical by convention
    return float((sum_cells - expected) / (max_index - expected))


def nmi(a, b) -> float:
    """Normalized mutual information, geometric-mean normalisation.

    Natural-log entropies; a single-cluster partition on either side
    has zero entropy, so the score degenerates to 0 (with a warning).
    """
    va, vb = _check_same_items(a, b)
    table = _contingency(va, vb).astype(float)
    n = table.sum()
    pa = table.sum(axis=1) / n
    pb = table.sum(axis=0) / n
    ha = -np.sum(pa * np.log(pa, where=pa > 0, out=np.zeros_like(pa)))
    hb = -np.sum(pb * np.log(pb, where=pb > 0, out=np.zeros_like(pb)))
    if ha == 0.0 or hb == 0.0:
        warnings.warn("degenerate entropy: single-cluster partition, NMI set to 0", stacklevel=2)
        return 0.0
    pij = table / n
    outer = pa[:, None] * pb[None, :]
    mask = pij > 0
    mi = float((pij[mask] * np.log(pij[mask] / outer[mask])).sum())
    return float(mi / math.sqrt(ha * hb))


def mantel(a: DistanceMatrix, b: DistanceMatrix) -> float:
    """Pearson correlation of the upper triangles of two distance
    matrices over the same labelled items."""
    if a.labels != b.labels:
        raise ValueError("distance matrices must share labels in the same order")
    n = a.n
    if n < 3:
        raise ValueError("mantel needs at least 3 items")
    iu, ju = np.triu_indices(n, k=1)
    x, y = a.values[iu, ju], b.values[iu, ju]
    xc, yc = x - x.mean(), y - y.mean()
    denom = math.sqrt(float((xc * xc).sum()) * float((yc * yc).sum()))
    if denom == 0.0:
        raise UndefinedCorrelationError("constant upper triangle")
    return float((xc * yc).sum() / denom)


@dataclass(frozen=True)
class ModelScore:
    method: str
    feature_space: str
    k: int
    silhouette: float
    calinski_harabasz: float
    note: str = ""


@dataclass(frozen=True)
class EvaluationReport:
    """Four-model score table (methods x feature spaces)."""

    rows: tuple[ModelScore, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for row in self.rows:
            if not -1.0 <= row.silhouette <= 1.0:
                raise ValueError(f"silhouette {row.silhouette} out of [-1, 1]")
            if row.calinski_harabasz < 0:
                raise ValueError("calinski_harabasz must be nonnegative")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method", "feature_space", "k", "silhouette", "calinski_harabasz", "note"])
            for r in self.rows:
                writer.writerow(
                    [r.method, r.feature_space, r.k, repr(r.silhouette), repr(r.calinski_harabasz), r.note]
                )

    def to_json(self) -> str:
        return json.dumps([r.__dict__ for r in self.rows], sort_keys=True)

    def score(self, method: str, feature_space: str) -> ModelScore:
        for r in self.rows:
            if r.method == method and r.feature_space == feature_space:
                return r
        raise KeyError((method, feature_space))


@dataclass(frozen=True)
class SensitivityRow:
    param_change: str
    mantel: float
    ari: float
    nmi: float
    error: str = ""


@dataclass(frozen=True)
class SensitivityReport:
    """Robustness metrics of each parameter variation against a baseline."""

    baseline: str
    rows: tuple[SensitivityRow, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.rows and not self.rows[0].error:
            first = self.rows[0]
            for name, val in (("mantel", first.mantel), ("ari", first.ari), ("nmi", first.nmi)):
                if abs(val - 1.0) > 1e-9:
                    raise ValueError(f"baseline row must have {name} = 1, got {val}")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["param_change", "mantel", "ari", "nmi", "error"])
            for r in self.rows:
                writer.writerow(
                    [
                        r.param_change,
                        "" if math.isnan(r.mantel) else repr(r.mantel),
                        "" if math.isnan(r.ari) else repr(r.ari),
                        "" if math.isnan(r.nmi) else repr(r.nmi),
                        r.error,
                    ]
                )
