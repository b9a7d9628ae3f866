"""Clustering algorithms and embedding machinery.

Seeded k-means (k-means++ initialisation, Lloyd iterations, restart
selection), complete-linkage agglomerative clustering on a precomputed
distance matrix, classical multidimensional scaling, and the elbow
curve used for choosing k.  Everything is deterministic given the seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embedding import DistanceMatrix, PointCloud

__all__ = [
    "ClusterAssignment",
    "Dendrogram",
    "kmeans",
    "elbow_curve",
    "hierarchical_complete",
    "classical_mds",
    "write_assignment_csv",
    "read_assignment_csv",
    "write_dendrogram_csv",
]


@dataclass(frozen=True)
class ClusterAssignment:
    """Item -> cluster-id map with method and parameter metadata."""

    labels: dict[str, int]
    k: int
    method: str  # "kmeans" | "hierarchical"
    feature_space: str  # "statistical" | "tda"
    inertia: float | None = None

    def __post_init__(self):
        ids = set(self.labels.values())
        if ids != set(range(self.k)):
            raise ValueError(f"cluster ids {sorted(ids)} do not cover 0..{self.k - 1}")

    def vector(self, order: Sequence[str]) -> np.ndarray:
        return np.array([self.labels[name] for name in order])

    def clusters(self) -> list[list[str]]:
        out: list[list[str]] = [[] for _ in range(self.k)]
        for name, cid in self.labels.items():
            out[cid].append(name)
        return out


@dataclass(frozen=True)
class Dendrogram:
    """Agglomerative merge history in linkage-matrix convention.

    Leaves are 0..n_leaves-1; the cluster created by merge step s gets
    id n_leaves + s.  Complete linkage guarantees non-decreasing merge
    heights.
    """

    merges: tuple[tuple[int, int, float, int], ...]
    n_leaves: int

    def __post_init__(self):
        object.__setattr__(self, "merges", tuple(tuple(m) for m in self.merges))
        if len(self.merges) != self.n_leaves - 1:
            raise ValueError("a full dendrogram has n_leaves - 1 merges")
        heights = [m[2] for m in self.merges]
        if any(b < a for a, b in zip(heights, heights[1:])):
            raise ValueError("merge heights must be non-decreasing")

    def linkage_matrix(self) -> np.ndarray:
        """As a scipy-style (n-1) x 4 float array for plotting."""
        return np.array([[a, b, h, s] for a, b, h, s in self.merges], dtype=float).reshape(-1, 4)


def _canonical_labels(raw: np.ndarray) -> np.ndarray:
    """Relabel cluster ids by order of first appearance."""
    mapping: dict[int, int] = {}
    out = np.empty(len(raw), dtype=int)
    for idx, lab in enumerate(raw):
        lab = int(lab)
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out[idx] = mapping[lab]
    return out


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return (diff * diff).sum(axis=2)


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: D^2-weighted sampling of successive centroids.

    Sampling walks the rows in lexicographic point order, so a given
    seed selects the same centroid coordinates no matter how the input
    rows are permuted.
    """
    canon = np.lexsort(points.T[::-1])
    ordered = points[canon]
    n = len(ordered)
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = ordered[rng.integers(n)]
    closest_sq = ((ordered - centroids[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest_sq.sum()
        if total == 0.0:
            idx = int(rng.integers(n))
        else:
            r = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(closest_sq), r, side="right"))
            idx = min(idx, n - 1)
        centroids[c] = ordered[idx]
        closest_sq = np.minimum(closest_sq, ((ordered - centroids[c]) ** 2).sum(axis=1))
    return centroids


def _lloyd(points: np.ndarray, k: int, centroids: np.ndarray, max_iter: int):
    """Lloyd iterations from given centroids.

    Returns (labels, centroids, inertia, history) where history holds
    the post-assignment inertia of every iteration (non-increasing).
    Empty clusters are re-seeded from the point farthest from its
    assigned centroid.
    """
    n = len(points)
    centroids = centroids.copy()
    labels = None
    history: list[float] = []
    for _ in range(max_iter):
        d2 = _squared_distances(points, centroids)
        new_labels = d2.argmin(axis=1)
        for c in range(k):
            if not (new_labels == c).any():
                far = int(d2[np.arange(n), new_labels].argmax())
                centroids[c] = points[far]
                d2[:, c] = ((points - centroids[c]) ** 2).sum(axis=1)
                new_labels = d2.argmin(axis=1)
                if not (new_labels == c).any():
                    new_labels[far] = c  # argmin tie went elsewhere
        history.append(float(d2[np.arange(n), new_labels].sum()))
        if labels is not None and (new_labels == labels).all():
            break
        labels = new_labels
        for c in range(k):
            centroids[c] = points[labels == c].mean(axis=0)
    return labels, centroids, history[-1], history


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int,
    item_labels: Sequence[str] | None = None,
    *,
    n_restarts: int = 10,
    max_iter: int = 300,
    feature_space: str = "statistical",
) -> ClusterAssignment:
    """Seeded k-means: best of ``n_restarts`` k-means++ starts by inertia.

    Restart r draws from ``default_rng([seed, r])``, so runs are
    reproducible and independent of any parallel schedule.  Ties on
    inertia keep the lowest restart index.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    if k > n:
        raise ValueError(f"k={k} exceeds number of rows {n}")
    if k < 1 or n < 2:
        raise ValueError("need k >= 1 and at least two rows")
    best = None
    for r in range(n_restarts):
        rng = np.random.default_rng([seed, r])
        init = _kmeans_pp_init(points, k, rng)
        labels, _, inertia, _ = _lloyd(points, k, init, max_iter)
        if best is None or inertia < best[1]:
            best = (labels, inertia)
    labels, inertia = best
    names = list(item_labels) if item_labels is not None else [str(i) for i in range(n)]
    canon = _canonical_labels(labels)
    return ClusterAssignment(
        dict(zip(names, (int(c) for c in canon))),
        k,
        "kmeans",
        feature_space,
        inertia=inertia,
    )


def elbow_curve(
    points: np.ndarray,
    k_max: int,
    seed: int,
    *,
    n_restarts: int = 10,
    max_iter: int = 300,
) -> list[tuple[int, float]]:
    """Within-cluster sum of squares for k = 1..k_max.

    Each k runs the seeded restart schedule ``default_rng([seed, k, r])``
    plus one warm start built from the previous k's centroids and the
    point farthest from them, which makes the curve provably
    non-increasing in k.
    """
    points = np.asarray(points, dtype=float)
    if k_max > len(points):
        raise ValueError(f"k_max={k_max} exceeds number of rows {len(points)}")
    curve: list[tuple[int, float]] = []
    prev: tuple[np.ndarray, np.ndarray, float] | None = None
    for k in range(1, k_max + 1):
        best = None
        for r in range(n_restarts):
            rng = np.random.default_rng([seed, k, r])
            init = _kmeans_pp_init(points, k, rng)
            labels, cents, inertia, _ = _lloyd(points, k, init, max_iter)
            if best is None or inertia < best[2]:
                best = (labels, cents, inertia)
        if prev is not None:
            far = int(
                ((points - prev[1][prev[0]]) ** 2).sum(axis=1).argmax()
            )
            warm = np.vstack([prev[1], points[far]])
            labels, cents, inertia, _ = _lloyd(points, k, warm, max_iter)
            if inertia < best[2]:
                best = (labels, cents, inertia)
        curve.append((k, best[2]))
        prev = best
    return curve


def hierarchical_complete(
    dist: DistanceMatrix,
    k: int,
    *,
    feature_space: str = "statistical",
) -> tuple[Dendrogram, ClusterAssignment]:
    """Complete-linkage agglomerative clustering on a distance matrix.

    At each step the two clusters with the smallest maximum inter-point
    distance merge; ties pick the smallest (id_a, id_b).  The assignment
    cuts the dendrogram at k clusters, labelling clusters 0..k-1 in
    order of their smallest leaf index.
    """
    n = dist.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    cur: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            cur[(i, j)] = float(dist.values[i, j])
    active = list(range(n))
    merges: list[tuple[int, int, float, int]] = []
    cut_labels: np.ndarray | None = None
    next_id = n
    while len(active) > 1:
        if len(active) == k:
            cut_labels = _cut_labels(members, active, n)
        best_pair, best_d = None, np.inf
        for ai in range(len(active)):
            for bi in range(ai + 1, len(active)):
                a, b = active[ai], active[bi]
                d = cur[(a, b)]
                if d < best_d:
                    best_d, best_pair = d, (a, b)
        a, b = best_pair
        merged = members.pop(a) + members.pop(b)
        active.remove(a)
        active.remove(b)
        for c in active:
            da = cur.pop((min(a, c), max(a, c)))
            db = cur.pop((min(b, c), max(b, c)))
            cur[(min(next_id, c), max(next_id, c))] = max(da, db)
        cur.pop((a, b))
        members[next_id] = merged
        active.append(next_id)
        merges.append((a, b, best_d, len(merged)))
        next_id += 1
    if len(active) == k:  # k == 1 (or n == 1)
        cut_labels = _cut_labels(members, active, n)
    assert cut_labels is not None
    dendro = Dendrogram(tuple(merges), n)
    assignment = ClusterAssignment(
        dict(zip(dist.labels, (int(c) for c in cut_labels))),
        k,
        "hierarchical",
        feature_space,
    )
    return dendro, assignment


def _cut_labels(members: dict[int, list[int]], active: list[int], n: int) -> np.ndarray:
    groups = sorted((min(members[a]), a) for a in active)
    labels = np.empty(n, dtype=int)
    for cid, (_, a) in enumerate(groups):
        for leaf in members[a]:
            labels[leaf] = cid
    return labels


def classical_mds(dist: DistanceMatrix, out_dim: int = 5) -> tuple[PointCloud, np.ndarray]:
    """Classical (Torgerson) MDS of a distance matrix.

    Double-centres -0.5 * J D^2 J, eigendecomposes, and embeds with the
    top ``out_dim`` eigenpairs.  Negative eigenvalues (non-Euclidean
    residue) are clamped to zero, so their coordinates vanish.  The
    second return value holds each retained component's fraction of the
    total positive eigenvalue mass.
    """
    n = dist.n
    if not 1 <= out_dim < n:
        raise ValueError(f"out_dim must be in [1, {n - 1}]")
    d2 = dist.values**2
    centering = np.eye(n) - np.ones((n, n)) / n
    gram = -0.5 * centering @ d2 @ centering
    gram = (gram + gram.T) / 2.0
    evals, evecs = np.linalg.eigh(gram)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    top = evals[:out_dim].copy()
    vecs = evecs[:, :out_dim].copy()
    for c in range(out_dim):
        pivot = int(np.argmax(np.abs(vecs[:, c])))
        if vecs[pivot, c] < 0:
            vecs[:, c] = -vecs[:, c]
    clamped = np.maximum(top, 0.0)
    coords = vecs * np.sqrt(clamped)
    positive_mass = float(evals[evals > 0].sum())
    fractions = clamped / positive_mass if positive_mass > 0 else np.zeros(out_dim)
    return PointCloud(coords, source_label="mds"), fractions


def write_assignment_csv(assignment: ClusterAssignment, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["currency", "label"])
        for name, cid in assignment.labels.items():
            writer.writerow([name, cid])


def read_assignment_csv(path, k: int, method: str, feature_space: str) -> ClusterAssignment:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        labels = {row[0]: int(row[1]) for row in reader if row}
    return ClusterAssignment(labels, k, method, feature_space)


def write_dendrogram_csv(dendro: Dendrogram, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_a", "node_b", "height", "new_size"])
        for a, b, h, s in dendro.merges:
            writer.writerow([a, b, repr(float(h)), s])
