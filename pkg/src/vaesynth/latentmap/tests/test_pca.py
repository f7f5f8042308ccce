import unittest

import numpy as np

from vaesynth.latentmap.cloud import PointCloud, Projection2D
from vaesynth.latentmap.pca import pca_2d


def labels(n: int):
    return ["a" if i % 2 else "b" for i in range(n)]


class TestPca(unittest.TestCase):

    def setUp(self):
        rng = np.random.default_rng(0)
        self.points = rng.standard_normal((60, 8)) * np.array([5.0, 3.0, 2.0, 1.0, 0.5, 0.4, 0.3, 0.2])
        self.cloud = PointCloud(self.points @ np.linalg.qr(rng.standard_normal((8, 8)))[0], labels(60))

    def test_rank_one(self):
        direction = np.array([1.0, -2.0, 0.5, 3.0, 1.5])
        t = np.linspace(-2.0, 3.0, 10)
        proj = pca_2d(PointCloud(np.outer(t, direction), labels(10)))
        self.assertTrue(np.all(np.abs(proj.coords[:, 1]) < 1e-6))
        self.assertGreater(np.ptp(proj.coords[:, 0]), 1.0)

    def test_variance_matches_eigensolver(self):
        proj = pca_2d(self.cloud)
        x = self.cloud.points - self.cloud.points.mean(axis=0)
        eig = np.sort(np.linalg.eigvalsh(x.T @ x / (x.shape[0] - 1)))[::-1]
        np.testing.assert_allclose(eig[:2], proj.params["explained_variance"], rtol=1e-6)
        np.testing.assert_allclose(eig[:2], np.var(proj.coords, axis=0, ddof=1), rtol=1e-6)

    def test_orthonormal_components(self):
        c = np.array(pca_2d(self.cloud).params["components"])
        np.testing.assert_allclose(np.eye(2), c @ c.T, atol=1e-9)

    def test_sign_convention(self):
        for component in pca_2d(self.cloud).params["components"]:
            component = np.array(component)
            self.assertGreater(component[np.argmax(np.abs(component))], 0.0)

    def test_deterministic(self):
        np.testing.assert_array_equal(pca_2d(self.cloud).coords, pca_2d(self.cloud).coords)

    def test_labels_do_not_matter(self):
        relabeled = self.cloud.relabel(["z"] * self.cloud.n)
        np.testing.assert_array_equal(pca_2d(self.cloud).coords, pca_2d(relabeled).coords)

    def test_zero_variance(self):
        proj = pca_2d(PointCloud(np.ones((4, 3)), labels(4)))
        self.assertTrue(proj.params["zero_variance"])
        np.testing.assert_array_equal(np.zeros((4, 2)), proj.coords)

    def test_too_few_points(self):
        with self.assertRaises(ValueError):
            pca_2d(PointCloud(np.zeros((2, 3)), labels(2)))


class TestCloud(unittest.TestCase):

    def test_label_count(self):
        with self.assertRaises(ValueError):
            PointCloud(np.zeros((3, 2)), ["a"])

    def test_needs_two_dims(self):
        with self.assertRaises(ValueError):
            PointCloud(np.zeros((3, 1)), ["a", "b", "c"])

    def test_projection_finite(self):
        with self.assertRaises(ValueError):
            Projection2D(np.array([[np.nan, 0.0]]), ["a"], "pca")


if __name__ == '__main__':
    unittest.main()
