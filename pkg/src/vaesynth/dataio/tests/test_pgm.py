import tempfile
import unittest
from pathlib import Path

import numpy as np

from vaesynth.dataio.pgm import GrayImage, PgmFormatError, decode_pgm, encode_pgm, read_pgm, write_pgm


class TestPgm(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def test_minimal_file(self):
        img = GrayImage.from_array(np.zeros((1, 1), dtype=np.uint8))
        path = self.dir / "one.pgm"
        write_pgm(img, path)
        self.assertEqual(b"P5\n1 1\n255\n\x00", path.read_bytes())

    def test_round_trip_image(self):
        rng = np.random.default_rng(0)
        img = GrayImage.from_array(rng.integers(0, 256, size=(64, 64), dtype=np.uint8))
        path = self.dir / "r.pgm"
        write_pgm(img, path)
        back = read_pgm(path)
        self.assertEqual((64, 64), (back.width, back.height))
        np.testing.assert_array_equal(img.pixels, back.pixels)

    def test_round_trip_bytes(self):
        rng = np.random.default_rng(1)
        data = encode_pgm(GrayImage.from_array(rng.integers(0, 256, size=(5, 7), dtype=np.uint8)))
        self.assertEqual(data, encode_pgm(decode_pgm(data)))

    def test_non_square(self):
        img = decode_pgm(b"P5\n3 2\n255\n" + bytes(range(6)))
        self.assertEqual(3, img.width)
        self.assertEqual(2, img.height)
        self.assertEqual([[0, 1, 2], [3, 4, 5]], img.pixels.tolist())

    def test_comments_are_tolerated(self):
        img = decode_pgm(b"P5\n# made by hand\n2 1 # size\n255\n\x07\x08")
        self.assertEqual([[7, 8]], img.pixels.tolist())
        self.assertNotIn(b"#", encode_pgm(img))

    def test_comment_after_maxval(self):
        img = decode_pgm(b"P5 2 1 255# scanner 4\n\x23\x0a")
        self.assertEqual([[0x23, 0x0a]], img.pixels.tolist())
        with self.assertRaises(PgmFormatError):
            decode_pgm(b"P5 2 1 255# no newline")

    def test_bad_magic(self):
        with self.assertRaises(PgmFormatError) as ctx:
            decode_pgm(b"P2\n1 1\n255\n0")
        self.assertEqual(0, ctx.exception.offset)

    def test_unsupported_maxval(self):
        with self.assertRaises(PgmFormatError) as ctx:
            decode_pgm(b"P5\n1 1\n65535\n\x00\x00")
        self.assertIn("unsupported maxval", str(ctx.exception))

    def test_truncated_payload(self):
        with self.assertRaises(PgmFormatError) as ctx:
            decode_pgm(b"P5\n4 4\n255\n" + bytes(10))
        self.assertIn("byte", str(ctx.exception))

    def test_missing_file(self):
        with self.assertRaises(IOError):
            read_pgm(self.dir / "missing.pgm")


if __name__ == '__main__':
    unittest.main()
