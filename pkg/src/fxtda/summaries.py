"""Vectorisations of and distances between persistence diagrams.

Barcodes, persistence landscapes, and Betti curves are emitted for
reporting; the p-Wasserstein distance between diagrams is the actual
clustering feature.  The bottleneck distance (the p -> infinity limit)
is provided for stability checks only.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .embedding import DistanceMatrix
from .persistence import PersistenceDiagram

__all__ = [
    "PersistenceLandscape",
    "BettiCurve",
    "barcode",
    "landscape",
    "betti_curve",
    "wasserstein",
    "bottleneck",
    "diagram_distance_matrix",
    "write_landscape_csv",
    "write_betti_csv",
]


@dataclass(frozen=True)
class PersistenceLandscape:
    """Piecewise-linear layers lambda_1 >= lambda_2 >= ... sampled on a grid."""

    grid: np.ndarray
    layers: np.ndarray  # shape (num_layers, len(grid))

    def __post_init__(self):
        object.__setattr__(self, "grid", np.asarray(self.grid, dtype=float))
        object.__setattr__(self, "layers", np.asarray(self.layers, dtype=float))
        if self.layers.ndim != 2 or self.layers.shape[1] != len(self.grid):
            raise ValueError("layers must be (num_layers, len(grid))")


@dataclass(frozen=True)
class BettiCurve:
    """Number of alive classes at each grid scale."""

    dimension: int
    grid: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "grid", np.asarray(self.grid, dtype=float))
        object.__setattr__(self, "counts", np.asarray(self.counts, dtype=np.int64))
        if len(self.counts) != len(self.grid):
            raise ValueError("counts must align with grid")


def barcode(diagram: PersistenceDiagram) -> np.ndarray:
    """Intervals [b, d) sorted by birth, then by descending persistence."""
    pairs = diagram.pairs
    if len(pairs) == 0:
        return np.empty((0, 2))
    order = np.lexsort((-(pairs[:, 1] - pairs[:, 0]), pairs[:, 0]))
    return pairs[order].copy()


def landscape(
    diagram: PersistenceDiagram,
    num_layers: int = 3,
    grid_size: int = 200,
    grid_max: float | None = None,
) -> PersistenceLandscape:
    """k-th largest tent functions over the diagram.

    lambda_k(t) is the k-th largest value of max(0, min(t - b, d - t))
    across pairs, evaluated on a uniform grid over [0, grid_max].
    """
    if num_layers < 1:
        raise ValueError("num_layers must be >= 1")
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    top = grid_max if grid_max is not None else diagram.eps_max
    grid = np.linspace(0.0, top, grid_size)
    if len(diagram.pairs) == 0:
        return PersistenceLandscape(grid, np.zeros((num_layers, grid_size)))
    b = diagram.pairs[:, 0][:, None]
    d = diagram.pairs[:, 1][:, None]
    tents = np.maximum(0.0, np.minimum(grid[None, :] - b, d - grid[None, :]))
    tents = np.sort(tents, axis=0)[::-1]
    layers = np.zeros((num_layers, grid_size))
    take = min(num_layers, tents.shape[0])
    layers[:take] = tents[:take]
    return PersistenceLandscape(grid, layers)


def betti_curve(
    diagram: PersistenceDiagram,
    grid_size: int = 200,
    grid_max: float | None = None,
) -> BettiCurve:
    """Interval-stabbing counts on grid points, half-open [b, d).

    Essential classes count as alive at every scale past their birth.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    top = grid_max if grid_max is not None else diagram.eps_max
    grid = np.linspace(0.0, top, grid_size)
    counts = np.zeros(grid_size, dtype=np.int64)
    for (b, d), ess in zip(diagram.pairs, diagram.essential):
        if ess:
            counts += (grid >= b)
        else:
            counts += (grid >= b) & (grid < d)
    return BettiCurve(diagram.dimension, grid, counts)


def _included_pairs(diagram: PersistenceDiagram, include_essential: bool) -> np.ndarray:
    pairs = diagram.pairs if include_essential else diagram.finite_pairs()
    if len(pairs) == 0:
        return np.empty((0, 2))
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order]


def _ground_distance(a: np.ndarray, b: np.ndarray, q: float) -> np.ndarray:
    """Pairwise l_q distances in the birth-death plane."""
    diff = np.abs(a[:, None, :] - b[None, :, :])
    if math.isinf(q):
        return diff.max(axis=2)
    if q == 1.0:
        return diff.sum(axis=2)
    if q == 2.0:
        return np.sqrt((diff**2).sum(axis=2))
    return ((diff**q).sum(axis=2)) ** (1.0 / q)


def _diagonal_cost(pairs: np.ndarray, q: float) -> np.ndarray:
    """l_q distance from each point to its nearest diagonal point
    ((b+d)/2, (b+d)/2)."""
    half = (pairs[:, 1] - pairs[:, 0]) / 2.0
    factor = 1.0 if math.isinf(q) else 2.0 ** (1.0 / q)
    return half * factor


def wasserstein(
    a: PersistenceDiagram,
    b: PersistenceDiagram,
    p: float = 2.0,
    q: float = 2.0,
    *,
    include_essential: bool = False,
) -> float:
    """p-Wasserstein distance with the diagonal as a sink.

    Solved exactly as an assignment problem on the augmented
    (n+m) x (n+m) cost matrix: point-to-point cost is the l_q ground
    distance raised to p, point-to-diagonal cost is the projection
    distance raised to p, diagonal-to-diagonal is free.  Arguments are
    canonicalised so the result is exactly symmetric.
    """
    if a.dimension != b.dimension:
        raise ValueError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    if p < 1.0:
        raise ValueError("p must be >= 1")
    if q < 1.0:
        raise ValueError("ground exponent q must be >= 1")
    pa = _included_pairs(a, include_essential)
    pb = _included_pairs(b, include_essential)
    if pb.tobytes() < pa.tobytes():
        pa, pb = pb, pa
    n, m = len(pa), len(pb)
    if n == 0 and m == 0:
        return 0.0
    if n == 0 or m == 0:
        points = pb if n == 0 else pa
        return float((_diagonal_cost(points, q) ** p).sum() ** (1.0 / p))
    cost = np.zeros((n + m, n + m))
    cost[:n, :m] = _ground_distance(pa, pb, q) ** p
    cost[:n, m:] = (_diagonal_cost(pa, q) ** p)[:, None]
    cost[n:, :m] = (_diagonal_cost(pb, q) ** p)[None, :]
    rows, cols = linear_sum_assignment(cost)
    total = float(np.sort(cost[rows, cols]).sum())
    return total ** (1.0 / p)


def _perfect_matching_exists(allowed: np.ndarray) -> bool:
    """Kuhn's augmenting-path test for a perfect matching in a square
    boolean bi-adjacency matrix."""
    size = allowed.shape[0]
    match_right = np.full(size, -1)

    def try_augment(u: int, seen: np.ndarray) -> bool:
        for v in np.flatnonzero(allowed[u]):
            if seen[v]:
                continue
            seen[v] = True
            if match_right[v] == -1 or try_augment(match_right[v], seen):
                match_right[v] = u
                return True
        return False

    for u in range(size):
        if not try_augment(u, np.zeros(size, dtype=bool)):
            return False
    return True


def bottleneck(
    a: PersistenceDiagram,
    b: PersistenceDiagram,
    *,
    include_essential: bool = False,
) -> float:
    """Bottleneck (W-infinity) distance with l_infinity ground metric."""
    if a.dimension != b.dimension:
        raise ValueError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    pa = _included_pairs(a, include_essential)
    pb = _included_pairs(b, include_essential)
    if pb.tobytes() < pa.tobytes():
        pa, pb = pb, pa
    n, m = len(pa), len(pb)
    if n == 0 and m == 0:
        return 0.0
    diag_a = _diagonal_cost(pa, math.inf) if n else np.empty(0)
    diag_b = _diagonal_cost(pb, math.inf) if m else np.empty(0)
    if n == 0:
        return float(diag_b.max())
    if m == 0:
        return float(diag_a.max())
    cross = _ground_distance(pa, pb, math.inf)
    cost = np.zeros((n + m, n + m))
    cost[:n, :m] = cross
    cost[:n, m:] = diag_a[:, None]
    cost[n:, :m] = diag_b[None, :]
    candidates = np.unique(np.concatenate([cross.ravel(), diag_a, diag_b, [0.0]]))
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_matching_exists(cost <= candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def diagram_distance_matrix(
    diagrams: Mapping[str, Sequence[PersistenceDiagram]],
    p: float = 2.0,
    q: float = 2.0,
    dim_weights: Sequence[float] = (1.0, 1.0),
    *,
    include_essential: bool = False,
    max_workers: int = 1,
) -> DistanceMatrix:
    """Weighted sum of per-dimension Wasserstein distances between
    every pair of labelled diagram collections.

    Entry (i, j) is ``sum_k dim_weights[k] * W_p(dgm_k_i, dgm_k_j)``.
    Pair computations are independent and may fan out to a thread pool;
    assembly order is fixed, so the result does not depend on
    ``max_workers``.
    """
    labels = tuple(diagrams.keys())
    n_dims = len(dim_weights)
    for code in labels:
        dgms = diagrams[code]
        if len(dgms) < n_dims:
            raise ValueError(f"missing diagram(s) for {code}: have {len(dgms)}, need {n_dims}")
        for k in range(n_dims):
            if dgms[k].dimension != k:
                raise ValueError(f"{code}: diagram at slot {k} has dimension {dgms[k].dimension}")

    n = len(labels)
    jobs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def pair_distance(ij):
        i, j = ij
        return sum(
            w * wasserstein(diagrams[labels[i]][k], diagrams[labels[j]][k], p, q, include_essential=include_essential)
            for k, w in enumerate(dim_weights)
        )

    if max_workers > 1 and jobs:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(pair_distance, jobs))
    else:
        results = [pair_distance(ij) for ij in jobs]

    values = np.zeros((n, n))
    for (i, j), val in zip(jobs, results):
        values[i, j] = values[j, i] = val
    return DistanceMatrix(labels, values)


def write_landscape_csv(ls: PersistenceLandscape, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["grid", *(f"layer{k + 1}" for k in range(ls.layers.shape[0]))])
        for g, col in zip(ls.grid, ls.layers.T):
            writer.writerow([repr(float(g)), *(repr(float(v)) for v in col)])


def write_betti_csv(curve: BettiCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["grid", "count"])
        for g, c in zip(curve.grid, curve.counts):
            writer.writerow([repr(float(g)), int(c)])
