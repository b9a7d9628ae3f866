import numpy as np
import pytest

from fxtda.embedding import (
    DistanceMatrix,
    EmbeddingError,
    PointCloud,
    delay_embed,
    pairwise_distances,
    pca_project,
)


class TestDelayEmbed:
    def test_direct_unrolling(self):
        cloud = delay_embed(np.array([1.0, 2.0, 3.0, 4.0, 5.0]), window=2, delay=1)
        assert cloud.points.tolist() == [[2.0, 1.0], [3.0, 2.0], [4.0, 3.0], [5.0, 4.0]]

    def test_window_one_identity(self):
        series = np.array([3.0, 1.0, 4.0])
        cloud = delay_embed(series, window=1, delay=1)
        assert cloud.points.shape == (3, 1)
        assert cloud.points[:, 0].tolist() == series.tolist()

    def test_point_count_formula(self):
        rng = np.random.default_rng(0)
        series = rng.normal(size=266)
        cloud = delay_embed(series, window=4, delay=1)
        assert cloud.points.shape == (263, 4)
        assert cloud.embed_window == 4 and cloud.embed_delay == 1

    def test_larger_delay(self):
        series = np.arange(10.0)
        cloud = delay_embed(series, window=3, delay=2)
        assert cloud.points.shape == (6, 3)
        assert cloud.points[0].tolist() == [4.0, 2.0, 0.0]

    def test_too_short(self):
        with pytest.raises(EmbeddingError, match="too short"):
            delay_embed(np.arange(6.0), window=4, delay=2)


class TestPairwiseDistances:
    def test_unit_square_distances(self):
        cloud = PointCloud(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
        dist = pairwise_distances(cloud)
        iu, ju = np.triu_indices(4, k=1)
        got = sorted(dist.values[iu, ju])
        assert got[:4] == pytest.approx([1.0] * 4)
        assert got[4:] == pytest.approx([np.sqrt(2.0)] * 2)

    def test_duplicate_point_zero_entry(self):
        cloud = PointCloud(np.array([[1.0, 2.0], [1.0, 2.0], [4.0, 6.0]]))
        dist = pairwise_distances(cloud)
        assert dist.values[0, 1] == 0.0

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(1)
        pts = rng.normal(size=(12, 3))
        dist = pairwise_distances(PointCloud(pts))
        for i in range(12):
            for j in range(12):
                expected = np.sqrt(sum((pts[i, c] - pts[j, c]) ** 2 for c in range(3)))
                assert dist.values[i, j] == pytest.approx(expected, abs=1e-12)

    def test_invariants(self):
        rng = np.random.default_rng(2)
        dist = pairwise_distances(PointCloud(rng.normal(size=(9, 4))))
        assert (dist.values == dist.values.T).all()
        assert (np.diag(dist.values) == 0.0).all()
        # triangle inequality on sampled triples
        for _ in range(50):
            i, j, k = rng.integers(0, 9, size=3)
            assert dist.values[i, k] <= dist.values[i, j] + dist.values[j, k] + 1e-12


class TestPca:
    def test_planar_data_fully_explained(self):
        rng = np.random.default_rng(3)
        basis = rng.normal(size=(2, 5))
        coeffs = rng.normal(size=(20, 2))
        rows = coeffs @ basis + rng.normal(size=5)
        coords, ratios = pca_project(rows, out_dim=2)
        assert coords.shape == (20, 2)
        assert ratios.sum() == pytest.approx(1.0, abs=1e-9)

    def test_mean_row_projects_to_origin(self):
        rng = np.random.default_rng(4)
        half = rng.normal(size=(8, 5))
        # mean-centred by construction; the final row IS the mean (zero)
        rows = np.vstack([half, -half, np.zeros(5)])
        coords, _ = pca_project(rows, out_dim=2)
        assert coords[-1] == pytest.approx(np.zeros(2), abs=1e-12)

    def test_component_variances_match_eigensolver(self):
        rng = np.random.default_rng(5)
        rows = rng.normal(size=(30, 6))
        coords, ratios = pca_project(rows, out_dim=3)
        centred = rows - rows.mean(axis=0)
        evals = np.sort(np.linalg.eigvalsh(centred.T @ centred))[::-1]
        expected = evals[:3] / evals.sum()
        assert ratios == pytest.approx(expected, abs=1e-9)
        for c in range(3):
            assert coords[:, c].var() * 30 == pytest.approx(evals[c], rel=1e-9)

    def test_out_dim_bounds(self):
        rng = np.random.default_rng(6)
        with pytest.raises(ValueError):
            pca_project(rng.normal(size=(4, 3)), out_dim=4)


class TestDistanceMatrixType:
    def test_rejects_asymmetry(self):
        with pytest.raises(ValueError, match="symmetric"):
            DistanceMatrix(("a", "b"), np.array([[0.0, 1.0], [2.0, 0.0]]))

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(ValueError, match="diagonal"):
            DistanceMatrix(("a", "b"), np.array([[1.0, 1.0], [1.0, 0.0]]))
