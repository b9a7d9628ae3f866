"""Vietoris-Rips persistent homology in dimensions 0 and 1.

The filtration is the clique complex of the distance graph restricted
to edges at or below ``eps_max``.  Connected-component persistence (H0)
comes from a Kruskal sweep: every tree edge of weight w kills a
component, giving the pair (0, w).  Loop persistence (H1) is computed
in cohomology: cycle-edge columns (tree edges are cleared by the H0
pairing) are processed in reverse filtration order, each column holding
the edge's triangle cofacets, and reduced over Z2 against a pivot table
keyed by the earliest cofacet.  By the anti-transposition duality this
yields exactly the boundary-matrix persistence pairing, but for Rips
filtrations almost every column pairs immediately with its earliest
cofacet, so hardly any column additions occur.  Classes still alive at
``eps_max`` are reported with death equal to ``eps_max`` and flagged
essential.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .embedding import DistanceMatrix

__all__ = [
    "PersistenceDiagram",
    "rips_persistence",
    "write_diagrams_csv",
    "read_diagrams_csv",
]


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of (birth, death) pairs for one homology dimension.

    ``essential[i]`` marks rows whose class never dies within the
    filtration; their recorded death is ``eps_max``.  Zero-persistence
    H1 pairs (birth == death) are dropped at construction time by
    :func:`rips_persistence`; H0 keeps them so that the number of rows
    equals the point count.
    """

    dimension: int
    pairs: np.ndarray  # shape (m, 2)
    essential: np.ndarray  # shape (m,), bool
    eps_max: float

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=float).reshape(-1, 2)
        ess = np.asarray(self.essential, dtype=bool).reshape(-1)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "essential", ess)
        if len(ess) != len(pairs):
            raise ValueError("essential mask length mismatch")
        if (pairs[:, 1] < pairs[:, 0]).any():
            raise ValueError("death before birth")

    @property
    def births(self) -> np.ndarray:
        return self.pairs[:, 0]

    @property
    def deaths(self) -> np.ndarray:
        return self.pairs[:, 1]

    @property
    def essential_count(self) -> int:
        return int(self.essential.sum())

    def finite_pairs(self) -> np.ndarray:
        """Rows that genuinely die within the filtration."""
        return self.pairs[~self.essential]

    def multiset(self) -> list[tuple[float, float, bool]]:
        return sorted(
            (float(b), float(d), bool(e))
            for (b, d), e in zip(self.pairs, self.essential)
        )


class _DisjointSet:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = np.arange(n)

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:  # path compression
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _sorted_edges(values: np.ndarray, eps_max: float):
    """Upper-triangle edges with weight <= eps_max, sorted by (w, i, j)."""
    n = values.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    w = values[iu, ju]
    keep = w <= eps_max
    iu, ju, w = iu[keep], ju[keep], w[keep]
    order = np.lexsort((ju, iu, w))
    return iu[order], ju[order], w[order]


class _CofacetIndex:
    """Triangle cofacets of each edge, encoded as sortable int64 keys.

    A triangle (a < b < c) with filtration value t maps to
    ``rank(t) * n^3 + a*n^2 + b*n + c`` where rank(t) is t's position
    among the sorted edge weights (every triangle value equals one of
    its edge weights exactly).  Ascending key order is therefore the
    filtration order (value, vertex triple), and the minimum key of a
    column is the edge's earliest cofacet.
    """

    def __init__(self, values: np.ndarray, ei, ej, ew, eps_max: float):
        self.values = values
        self.ei, self.ej, self.ew = ei, ej, ew
        n = values.shape[0]
        self.n = n
        self.n3 = n * n * n
        self.adj = values <= eps_max
        np.fill_diagonal(self.adj, False)
        self.vertex_ids = np.arange(n)
        self.uniq_w = np.unique(ew)

    def keys(self, e: int) -> np.ndarray:
        i, j = int(self.ei[e]), int(self.ej[e])
        mask = self.adj[i] & self.adj[j]
        ks = self.vertex_ids[mask]
        if ks.size == 0:
            return ks.astype(np.int64)
        tval = np.maximum(self.ew[e], np.maximum(self.values[i, ks], self.values[j, ks]))
        rank = np.searchsorted(self.uniq_w, tval).astype(np.int64)
        lo = np.minimum(min(i, j), ks)
        hi = np.maximum(max(i, j), ks)
        mid = i + j + ks - lo - hi
        n = self.n
        return rank * self.n3 + (lo * n + mid) * n + hi

    def death_value(self, key: int) -> float:
        return float(self.uniq_w[key // self.n3])


def rips_persistence(
    dist: DistanceMatrix,
    max_dim: int = 1,
    eps_max: float | None = None,
) -> list[PersistenceDiagram]:
    """Persistence diagrams of the Rips filtration, dimensions 0..max_dim.

    ``eps_max`` defaults to the largest pairwise distance, which makes
    H0 complete (a single essential component) and lets every H1 class
    die inside the filtration.
    """
    if max_dim not in (0, 1):
        raise ValueError("max_dim must be 0 or 1")
    if eps_max is None:
        eps_max = dist.max_distance()
        if eps_max == 0.0:
            eps_max = 1.0  # single point or coincident cloud
    if eps_max <= 0:
        raise ValueError("eps_max must be positive")

    n = dist.n
    ei, ej, ew = _sorted_edges(dist.values, eps_max)

    # H0: Kruskal sweep; each merging edge kills one component.
    dsu = _DisjointSet(n)
    tree = np.zeros(len(ew), dtype=bool)
    h0_deaths = []
    for e in range(len(ew)):
        if dsu.union(int(ei[e]), int(ej[e])):
            tree[e] = True
            h0_deaths.append(ew[e])
    n_components = n - len(h0_deaths)
    h0_pairs = [(0.0, float(d)) for d in h0_deaths] + [(0.0, eps_max)] * n_components
    h0_flags = [False] * len(h0_deaths) + [True] * n_components
    h0 = PersistenceDiagram(0, np.array(h0_pairs).reshape(-1, 2), np.array(h0_flags, dtype=bool), eps_max)
    if max_dim == 0:
        return [h0]

    # H1 in cohomology: cycle-edge columns in reverse filtration order.
    # pivot maps the earliest-cofacet key to either ("raw", edge) when
    # the stored column is the edge's unreduced cofacet set, or
    # ("col", set) when additions were needed.
    cofacets = _CofacetIndex(dist.values, ei, ej, ew, eps_max)
    pivot: dict[int, tuple[str, object]] = {}
    h1_pairs: list[tuple[float, float]] = []
    essential_births: list[float] = []
    for e in np.flatnonzero(~tree)[::-1]:
        e = int(e)
        keys = cofacets.keys(e)
        birth = float(ew[e])
        if keys.size == 0:
            essential_births.append(birth)
            continue
        low = int(keys.min())
        if low not in pivot:
            pivot[low] = ("raw", e)
            death = cofacets.death_value(low)
            if death > birth:
                h1_pairs.append((birth, death))
            continue
        col = set(keys.tolist())
        while col:
            low = min(col)
            entry = pivot.get(low)
            if entry is None:
                pivot[low] = ("col", col)
                death = cofacets.death_value(low)
                if death > birth:
                    h1_pairs.append((birth, death))
                break
            if entry[0] == "raw":
                col ^= set(cofacets.keys(entry[1]).tolist())
            else:
                col ^= entry[1]
        else:
            essential_births.append(birth)

    h1_pairs.sort()
    essential_births.sort()
    pairs = h1_pairs + [(b, eps_max) for b in essential_births]
    flags = [False] * len(h1_pairs) + [True] * len(essential_births)
    h1 = PersistenceDiagram(
        1,
        np.array(pairs).reshape(-1, 2),
        np.array(flags, dtype=bool),
        eps_max,
    )
    return [h0, h1]


def write_diagrams_csv(diagrams, path) -> None:
    """One CSV row per class: dimension, birth, death, essential_flag."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dimension", "birth", "death", "essential"])
        for dgm in diagrams:
            for (b, d), e in zip(dgm.pairs, dgm.essential):
                writer.writerow([dgm.dimension, repr(float(b)), repr(float(d)), int(e)])


def read_diagrams_csv(path, eps_max: float | None = None) -> list[PersistenceDiagram]:
    """Read back diagrams written by :func:`write_diagrams_csv`.

    ``eps_max`` defaults to the largest death value in the file.
    """
    by_dim: dict[int, list[tuple[float, float, bool]]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            if not row:
                continue
            dim, b, d, e = int(row[0]), float(row[1]), float(row[2]), bool(int(row[3]))
            by_dim.setdefault(dim, []).append((b, d, e))
    out = []
    for dim in sorted(by_dim):
        rows = by_dim[dim]
        ceiling = eps_max if eps_max is not None else max((d for _, d, _ in rows), default=0.0)
        out.append(
            PersistenceDiagram(
                dim,
                np.array([(b, d) for b, d, _ in rows]).reshape(-1, 2),
                np.array([e for _, _, e in rows], dtype=bool),
                ceiling,
            )
        )
    return out
