import unittest
from fractions import Fraction
from pathlib import Path

from vaesynth.dataio.manifest import DatasetManifest
from vaesynth.evalkit.split import SplitSpec, allocate, stratified_split, stratified_split_by_origin


def manifest(per_class: int, classes=("clean", "cross", "side", "top", "bottom")) -> DatasetManifest:
    classes = sorted(classes)
    files = {c: [Path(f"/data/{c}/{c}_{i:03d}.pgm") for i in range(per_class)] for c in classes}
    return DatasetManifest(Path("/data"), classes, files)


class TestAllocate(unittest.TestCase):

    def test_exact(self):
        self.assertEqual([80, 10, 10], allocate(100, [Fraction(8, 10), Fraction(1, 10), Fraction(1, 10)]))

    def test_largest_remainder_tie_goes_to_train(self):
        self.assertEqual([4, 3, 3], allocate(10, [Fraction(1, 3)] * 3))

    def test_largest_remainder(self):
        self.assertEqual([3, 1, 1], allocate(5, [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]))
        self.assertEqual([2, 2, 1], allocate(5, [Fraction(2, 5), Fraction(7, 20), Fraction(1, 4)]))


class TestStratifiedSplit(unittest.TestCase):

    def test_counts(self):
        train, val, test = stratified_split(manifest(100), SplitSpec())
        self.assertEqual((400, 50, 50), (train.total, val.total, test.total))
        for part, n in ((train, 80), (val, 10), (test, 10)):
            self.assertTrue(all(v == n for v in part.counts.values()))

    def test_thirds(self):
        train, val, test = stratified_split(manifest(10), SplitSpec(1 / 3, 1 / 3, 1 / 3))
        self.assertEqual({c: 4 for c in train.classes}, train.counts)
        self.assertEqual({c: 3 for c in val.classes}, val.counts)
        self.assertEqual({c: 3 for c in test.classes}, test.counts)

    def test_partition(self):
        m = manifest(12)
        parts = stratified_split(m, SplitSpec(seed=3))
        for c in m.classes:
            joined = [p for part in parts for p in part.files[c]]
            self.assertEqual(sorted(m.files[c]), sorted(joined))
            self.assertEqual(len(joined), len(set(joined)))

    def test_seeded(self):
        a = stratified_split(manifest(20), SplitSpec(seed=1))
        b = stratified_split(manifest(20), SplitSpec(seed=1))
        c = stratified_split(manifest(20), SplitSpec(seed=2))
        self.assertEqual(a[0].files, b[0].files)
        self.assertNotEqual(a[0].files, c[0].files)

    def test_class_too_small(self):
        m = manifest(5)
        m.files["side"] = m.files["side"][:2]
        with self.assertRaises(ValueError) as ctx:
            stratified_split(m, SplitSpec())
        self.assertIn("side", str(ctx.exception))

    def test_invalid_ratios(self):
        with self.assertRaises(ValueError):
            SplitSpec(0.9, 0.1, 0.0)
        with self.assertRaises(ValueError):
            SplitSpec(0.8, 0.1, 0.2)


class TestSplitByOrigin(unittest.TestCase):

    def generated(self) -> DatasetManifest:
        files = {}
        for c in ("a", "b"):
            files[c] = sorted([Path(f"/gen/{c}/{c}_{i}_orig.pgm") for i in range(10)]
                              + [Path(f"/gen/{c}/{c}_{i}_recon_{j}.pgm") for i in range(10) for j in range(9)])
        return DatasetManifest(Path("/gen"), ["a", "b"], files)

    def test_every_part_is_mixed(self):
        m = self.generated()
        parts = stratified_split_by_origin(m, SplitSpec(seed=5))
        self.assertEqual([160, 20, 20], [p.total for p in parts])
        for part in parts:
            for c in m.classes:
                originals = [p for p in part.files[c] if p.stem.endswith("_orig")]
                self.assertGreater(len(originals), 0)
                self.assertGreater(len(part.files[c]), len(originals))
        joined = sorted(p for part in parts for c in m.classes for p in part.files[c])
        self.assertEqual(sorted(p for c in m.classes for p in m.files[c]), joined)

    def test_too_few_originals(self):
        m = self.generated()
        m.files["b"] = [p for p in m.files["b"] if not p.stem.endswith("_orig")] + m.files["b"][:2]
        with self.assertRaises(ValueError) as ctx:
            stratified_split_by_origin(m, SplitSpec())
        self.assertIn("original", str(ctx.exception))


if __name__ == '__main__':
    unittest.main()
