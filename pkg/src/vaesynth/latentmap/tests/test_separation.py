import unittest

import numpy as np

from vaesynth.latentmap.cloud import PointCloud, Projection2D
from vaesynth.latentmap.separation import cluster_separation


class TestClusterSeparation(unittest.TestCase):

    def test_zero_spread(self):
        x = np.array([[1.0, 0.0]] * 3 + [[0.0, 1.0]] * 3)
        self.assertEqual(0.0, cluster_separation(x, ["a"] * 3 + ["b"] * 3))

    def test_permutation_baseline(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((40, 3))
        labels = np.array(["a", "b", "c", "d"] * 10)
        ratios = [cluster_separation(x, rng.permutation(labels)) for _ in range(100)]
        self.assertAlmostEqual(1.0, float(np.mean(ratios)), delta=0.1)

    def test_from_cloud_and_projection(self):
        x = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
        labels = ["a", "a", "b", "b"]
        ratio = cluster_separation(PointCloud(x, labels))
        self.assertEqual(ratio, cluster_separation(Projection2D(x, labels, "pca")))
        self.assertLess(ratio, 0.2)

    def test_single_class(self):
        with self.assertRaises(ValueError):
            cluster_separation(np.zeros((3, 2)), ["a"] * 3)

    def test_class_of_one(self):
        with self.assertRaises(ValueError):
            cluster_separation(np.arange(6.0).reshape(3, 2), ["a", "a", "b"])


if __name__ == '__main__':
    unittest.main()
