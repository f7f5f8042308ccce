import json
import tempfile
import unittest
from pathlib import Path

import numpy as np
from sklearn.metrics import classification_report

from vaesynth.evalkit.metrics import ConfusionMatrix, metrics_from_confusion


class TestMetrics(unittest.TestCase):

    def test_two_class_oracle(self):
        r = metrics_from_confusion(ConfusionMatrix(np.array([[8, 2], [1, 9]]), ["a", "b"]))
        self.assertAlmostEqual(8 / 9, r.precision[0])
        self.assertAlmostEqual(0.8, r.recall[0])
        self.assertAlmostEqual(2 * (8 / 9) * 0.8 / (8 / 9 + 0.8), r.f1[0])
        self.assertAlmostEqual(0.85, r.accuracy)
        self.assertEqual([10, 10], r.support)

    def test_perfect(self):
        r = metrics_from_confusion(ConfusionMatrix(np.diag([3, 4, 5]), ["a", "b", "c"]))
        for values in (r.precision, r.recall, r.f1):
            self.assertEqual([1.0, 1.0, 1.0], values)
        self.assertEqual(1.0, r.accuracy)
        self.assertEqual(1.0, r.macro_f1)

    def test_absent_class(self):
        r = metrics_from_confusion(ConfusionMatrix(np.array([[5, 0], [0, 0]]), ["a", "b"]))
        self.assertEqual((0.0, 0.0, 0.0), (r.precision[1], r.recall[1], r.f1[1]))
        self.assertEqual(0.5, r.macro_f1)

    def test_constant_predictor(self):
        m = ConfusionMatrix.from_predictions([0, 1, 2, 1], [0, 0, 0, 0], ["a", "b", "c"])
        self.assertEqual(4, m.counts[:, 0].sum())
        self.assertEqual(4, m.total)
        r = metrics_from_confusion(m)
        self.assertEqual(0.25, r.accuracy)
        self.assertEqual(0.0, r.f1[1])

    def test_accuracy_is_trace(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            counts = rng.integers(0, 10, size=(4, 4))
            counts[0, 0] += 1
            r = metrics_from_confusion(ConfusionMatrix(counts, list("abcd")))
            self.assertAlmostEqual(np.trace(counts) / counts.sum(), r.accuracy)
            for v in r.precision + r.recall + r.f1:
                self.assertTrue(0.0 <= v <= 1.0)

    def test_permutation_equivariant(self):
        counts = np.array([[5, 1, 0], [2, 6, 1], [0, 3, 4]])
        perm = [2, 0, 1]
        a = metrics_from_confusion(ConfusionMatrix(counts, ["x", "y", "z"]))
        b = metrics_from_confusion(ConfusionMatrix(counts[np.ix_(perm, perm)], ["z", "x", "y"]))
        np.testing.assert_allclose(np.array(a.f1)[perm], b.f1)
        np.testing.assert_allclose(np.array(a.precision)[perm], b.precision)
        self.assertAlmostEqual(a.accuracy, b.accuracy)
        self.assertAlmostEqual(a.macro_f1, b.macro_f1)

    def test_uniform_random_predictor(self):
        rng = np.random.default_rng(7)
        actual = np.repeat(np.arange(5), 20)
        accuracies = [metrics_from_confusion(ConfusionMatrix.from_predictions(
            actual, rng.integers(0, 5, size=actual.size), list("abcde"))).accuracy for _ in range(1000)]
        self.assertAlmostEqual(0.2, float(np.mean(accuracies)), delta=0.05)

    def test_pairs_rebuild_counts(self):
        counts = np.array([[2, 0, 1], [0, 0, 3], [1, 1, 0]])
        m = ConfusionMatrix(counts, ["a", "b", "c"])
        actual, predicted = m.pairs()
        self.assertEqual(8, actual.size)
        np.testing.assert_array_equal(counts, ConfusionMatrix.from_predictions(actual, predicted, m.classes).counts)

    def test_matches_classification_report(self):
        rng = np.random.default_rng(3)
        actual, predicted = rng.integers(0, 4, size=60), rng.integers(0, 4, size=60)
        r = metrics_from_confusion(ConfusionMatrix.from_predictions(actual, predicted, list("abcd")))
        expected = classification_report(actual, predicted, labels=range(4), target_names=list("abcd"),
                                         output_dict=True, zero_division=0)
        for i, c in enumerate("abcd"):
            self.assertAlmostEqual(expected[c]["precision"], r.precision[i])
            self.assertAlmostEqual(expected[c]["recall"], r.recall[i])
            self.assertAlmostEqual(expected[c]["f1-score"], r.f1[i])
        self.assertAlmostEqual(expected["macro avg"]["f1-score"], r.macro_f1)

    def test_empty(self):
        with self.assertRaises(ValueError):
            metrics_from_confusion(ConfusionMatrix(np.zeros((2, 2)), ["a", "b"]))

    def test_outputs(self):
        r = metrics_from_confusion(ConfusionMatrix(np.array([[8, 2], [1, 9]]), ["a", "b"]))
        with tempfile.TemporaryDirectory() as tmp:
            csv, js = Path(tmp) / "metrics.csv", Path(tmp) / "metrics.json"
            r.to_csv(csv)
            r.to_json(js)
            lines = csv.read_text().splitlines()
            self.assertEqual("class,precision,recall,f1,support", lines[0])
            self.assertEqual("a,0.888888889,0.8,0.842105263,10", lines[1])
            self.assertAlmostEqual(0.85, json.loads(js.read_text())["accuracy"])


if __name__ == '__main__':
    unittest.main()
