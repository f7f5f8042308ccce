import tempfile
import unittest
from pathlib import Path

import numpy as np

from vaesynth.dataio.csvio import read_csv, write_csv


class TestCsv(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.path = Path(self._tmp.name) / "out.csv"

    def tearDown(self):
        self._tmp.cleanup()

    def test_header_only(self):
        write_csv([], ["epoch", "total"], self.path)
        self.assertEqual(b"epoch,total\n", self.path.read_bytes())

    def test_float_formatting(self):
        write_csv([[1, 0.5]], ["epoch", "total"], self.path)
        self.assertEqual(b"epoch,total\n1,0.5\n", self.path.read_bytes())

    def test_numpy_values(self):
        write_csv([[np.int64(2), np.float32(0.25), "top"]], ["a", "b", "c"], self.path)
        self.assertEqual(b"a,b,c\n2,0.25,top\n", self.path.read_bytes())

    def test_quoting(self):
        write_csv([["a,b", 1]], ["name", "n"], self.path)
        self.assertEqual(b'name,n\n"a,b",1\n', self.path.read_bytes())

    def test_parse_back(self):
        rng = np.random.default_rng(0)
        values = rng.normal(size=20) * 10.0 ** rng.integers(-5, 5, size=20)
        write_csv([[v] for v in values], ["v"], self.path)
        back = read_csv(self.path)["v"].to_numpy()
        # 9 significant digits bound the relative error by 5e-9
        np.testing.assert_allclose(back, values, rtol=5e-9)

    def test_arity_mismatch(self):
        with self.assertRaises(ValueError):
            write_csv([[1, 2, 3]], ["a", "b"], self.path)


if __name__ == '__main__':
    unittest.main()
