import tempfile
import unittest
from pathlib import Path

import numpy as np

from vaesynth.dataio.manifest import scan_manifest
from vaesynth.dataio.pgm import GrayImage, write_pgm
from vaesynth.synthgen.preprocess import load_labeled_images, preprocess_image, quantize


class TestPreprocess(unittest.TestCase):

    def test_identity_resize(self):
        raw = np.random.default_rng(0).integers(0, 256, size=(8, 8), dtype=np.uint8)
        np.testing.assert_array_equal(raw / 255.0, preprocess_image(GrayImage.from_array(raw), 8))

    def test_area_average(self):
        raw = np.array([[0, 255], [255, 0]], dtype=np.uint8)
        self.assertEqual(0.5, preprocess_image(raw, 1)[0, 0])

    def test_downsample_blocks(self):
        raw = np.kron(np.array([[0, 255], [51, 102]], dtype=np.uint8), np.ones((3, 3), dtype=np.uint8))
        np.testing.assert_allclose([[0.0, 1.0], [0.2, 0.4]], preprocess_image(raw, 2))

    def test_range_and_shape(self):
        raw = np.random.default_rng(1).integers(0, 256, size=(100, 100), dtype=np.uint8)
        x = preprocess_image(raw, 64)
        self.assertEqual((64, 64), x.shape)
        self.assertTrue(np.all((x >= 0.0) & (x <= 1.0)))

    def test_upsample_non_square(self):
        x = preprocess_image(np.full((3, 5), 255, dtype=np.uint8), 8)
        np.testing.assert_allclose(np.ones((8, 8)), x)

    def test_zero_dimension(self):
        with self.assertRaises(ValueError):
            preprocess_image(np.zeros((0, 4), dtype=np.uint8), 4)

    def test_quantize_restores_bytes(self):
        raw = np.arange(256, dtype=np.uint8).reshape(16, 16)
        np.testing.assert_array_equal(raw, quantize(preprocess_image(raw, 16)).pixels)

    def test_quantize_clips(self):
        np.testing.assert_array_equal([[0, 255]], quantize(np.array([[-0.5, 1.5]])).pixels)


class TestLoadLabeledImages(unittest.TestCase):

    def test_load(self):
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            for label, name in enumerate(["a", "b"]):
                (root / name).mkdir()
                for i in range(2 + label):
                    write_pgm(GrayImage.from_array(np.full((4, 4), 51 * (label + 1), dtype=np.uint8)),
                              root / name / f"{i}.pgm")
            data = load_labeled_images(scan_manifest(root), 4)
        self.assertEqual((5, 1, 4, 4), data.x.shape)
        self.assertEqual([0, 0, 1, 1, 1], data.y.tolist())
        self.assertEqual(["a", "b"], data.classes)
        self.assertAlmostEqual(0.4, float(data.of_class("b")[0, 0, 0, 0]))


if __name__ == '__main__':
    unittest.main()
