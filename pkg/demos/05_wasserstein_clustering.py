"""The four-model comparison on one synthetic panel.

Statistical branch: k-means and complete linkage on standardised return
vectors.  Topological branch: per-currency persistence diagrams, the
pairwise 2-Wasserstein matrix, hierarchical clustering directly on it,
and k-means on its 5-d classical-MDS embedding.  Both branches are
scored with Silhouette and Calinski-Harabasz.
"""

import numpy as np

from fxtda import (
    calinski_harabasz,
    classical_mds,
    delay_embed,
    diagram_distance_matrix,
    hierarchical_complete,
    kmeans,
    pairwise_distances,
    rips_persistence,
    silhouette,
)
from fxtda.embedding import DistanceMatrix
from demo_data import standardized_panel

CODES = ("AAA", "BBB", "CCC", "DDD", "EEE", "FFF", "GGG", "HHH")
panel = standardized_panel(CODES, seed=31)
k, seed = 3, 11

# statistical branch: each currency is its standardised return history
vectors = panel.values.T
diff = vectors[:, None, :] - vectors[None, :, :]
stat_values = np.sqrt((diff**2).sum(axis=2))
iu, ju = np.triu_indices(len(CODES), k=1)
stat_values[ju, iu] = stat_values[iu, ju]
np.fill_diagonal(stat_values, 0.0)
stat_dist = DistanceMatrix(CODES, stat_values)

km_stat = kmeans(vectors, k, seed, CODES, feature_space="statistical")
_, hc_stat = hierarchical_complete(stat_dist, k, feature_space="statistical")

# topological branch: diagrams -> Wasserstein matrix -> MDS / direct
diagrams = {}
for code in CODES:
    dist = pairwise_distances(delay_embed(panel.column(code), 4, 1, label=code))
    diagrams[code] = rips_persistence(dist)
wmatrix = diagram_distance_matrix(diagrams, p=2.0, q=2.0)
mds_cloud, fractions = classical_mds(wmatrix, out_dim=5)
print(f"MDS keeps {fractions.sum():.1%} of the positive eigenvalue mass in 5 dims\n")

km_tda = kmeans(mds_cloud.points, k, seed, CODES, feature_space="tda")
_, hc_tda = hierarchical_complete(wmatrix, k, feature_space="tda")

mds_diff = mds_cloud.points[:, None, :] - mds_cloud.points[None, :, :]
mds_values = np.sqrt((mds_diff**2).sum(axis=2))
mds_values[ju, iu] = mds_values[iu, ju]
np.fill_diagonal(mds_values, 0.0)
mds_dist = DistanceMatrix(CODES, mds_values)

models = [
    ("kmeans/statistical", km_stat, stat_dist, vectors),
    ("hierarchical/statistical", hc_stat, stat_dist, vectors),
    ("kmeans/tda", km_tda, mds_dist, mds_cloud.points),
    ("hierarchical/tda", hc_tda, wmatrix, mds_cloud.points),
]
print(f"{'model':26s} {'silhouette':>11s} {'calinski-harabasz':>18s}   clusters")
for name, assignment, dist, points in models:
    sil = silhouette(dist, assignment)
    ch = calinski_harabasz(points, assignment.vector(CODES))
    groups = [" ".join(sorted(g)) for g in assignment.clusters()]
    print(f"{name:26s} {sil:11.3f} {ch:18.3f}   {' | '.join(groups)}")
