import tempfile
import unittest
from pathlib import Path

import numpy as np

from vaesynth.numcore.tensor import NumericMode, ShapeError
from vaesynth.vae.model import VaeModel, decode, encode
from vaesynth.vae.serialize import ModelFormatError, load_model, save_model


class TestSerialize(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.path = Path(self._tmp.name) / "model.bin"
        self.model = VaeModel.create(image_side=8, latent_dim=4, seed=21)

    def tearDown(self):
        self._tmp.cleanup()

    def assert_same_params(self, a: VaeModel, b: VaeModel):
        self.assertEqual(a.params.names(), b.params.names())
        for name, p in a.params.items():
            self.assertEqual(p.dtype, b.params[name].dtype)
            np.testing.assert_array_equal(p.data, b.params[name].data)

    def test_round_trip(self):
        save_model(self.model, self.path)
        loaded = load_model(self.path)
        self.assertEqual((8, 4, NumericMode.STANDARD), (loaded.image_side, loaded.latent_dim, loaded.mode))
        self.assert_same_params(self.model, loaded)
        x = np.random.default_rng(0).uniform(size=(2, 1, 8, 8))
        np.testing.assert_array_equal(encode(self.model, x)[0].data, encode(loaded, x)[0].data)

    def test_round_trip_verification_mode(self):
        model = VaeModel.create(image_side=8, latent_dim=3, mode=NumericMode.VERIFICATION, seed=2)
        save_model(model, self.path)
        loaded = load_model(self.path)
        self.assertIs(NumericMode.VERIFICATION, loaded.mode)
        self.assert_same_params(model, loaded)

    def test_header(self):
        save_model(self.model, self.path)
        raw = self.path.read_bytes()
        self.assertEqual(b"VAE1", raw[:4])
        self.assertEqual(32, raw[4])
        self.assertEqual((8).to_bytes(4, "little"), raw[5:9])

    def test_values_follow_dims(self):
        save_model(self.model, self.path)
        raw = self.path.read_bytes()
        self.assertEqual((4).to_bytes(4, "little"), raw[9:13])
        values = np.concatenate([p.data.ravel() for p in self.model.params.values()]).astype("<f4")
        self.assertEqual(13 + 4 * values.size, len(raw))
        self.assertEqual(values.tobytes(), raw[13:])

    def test_verification_mode_stores_doubles(self):
        model = VaeModel.create(image_side=8, latent_dim=4, mode=NumericMode.VERIFICATION, seed=2)
        save_model(model, self.path)
        raw = self.path.read_bytes()
        self.assertEqual(64, raw[4])
        self.assertEqual(13 + 8 * sum(p.size for p in model.params.values()), len(raw))

    def test_unknown_mode(self):
        save_model(self.model, self.path)
        raw = bytearray(self.path.read_bytes())
        raw[4] = 16
        self.path.write_bytes(bytes(raw))
        with self.assertRaises(ModelFormatError):
            load_model(self.path)

    def test_save_twice_identical_bytes(self):
        save_model(self.model, self.path)
        other = self.path.with_name("other.bin")
        save_model(self.model, other)
        self.assertEqual(self.path.read_bytes(), other.read_bytes())

    def test_truncated(self):
        save_model(self.model, self.path)
        raw = self.path.read_bytes()
        for cut in (3, 10, 20, len(raw) // 2, len(raw) - 1):
            self.path.write_bytes(raw[:cut])
            with self.assertRaises(ModelFormatError, msg=f"cut at {cut}"):
                load_model(self.path)

    def test_bad_magic(self):
        save_model(self.model, self.path)
        self.path.write_bytes(b"VAE2" + self.path.read_bytes()[4:])
        with self.assertRaises(ModelFormatError):
            load_model(self.path)

    def test_trailing_bytes(self):
        save_model(self.model, self.path)
        self.path.write_bytes(self.path.read_bytes() + b"\x00")
        with self.assertRaises(ModelFormatError):
            load_model(self.path)

    def test_missing_file(self):
        with self.assertRaises(IOError):
            load_model(self.path)

    def test_wrong_latent_dim_fails_downstream(self):
        save_model(self.model, self.path)
        loaded = load_model(self.path)
        with self.assertRaises(ShapeError) as ctx:
            decode(loaded, np.zeros((1, 32)))
        self.assertIn("4", str(ctx.exception))


if __name__ == '__main__':
    unittest.main()
