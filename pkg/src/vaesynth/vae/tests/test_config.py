import unittest

from vaesynth.numcore.tensor import NumericMode
from vaesynth.vae.config import DEFAULT_BETA_KLD, TrainConfig


class TestTrainConfig(unittest.TestCase):

    def test_defaults(self):
        cfg = TrainConfig()
        self.assertEqual(100, cfg.epochs)
        self.assertEqual(0.001, cfg.lambda_wd)
        self.assertEqual(DEFAULT_BETA_KLD, cfg.beta_kld)
        self.assertGreater(cfg.beta_kld, 0.0)
        self.assertIs(NumericMode.STANDARD, cfg.mode)

    def test_invalid_values(self):
        for kwargs in ({"epochs": 0}, {"batch_size": 0}, {"lambda_wd": -1e-3}, {"beta_kld": -1.0},
                       {"learning_rate": -0.1}):
            with self.assertRaises(ValueError, msg=str(kwargs)):
                TrainConfig(**kwargs)

    def test_to_dict(self):
        self.assertEqual("64", TrainConfig(mode=NumericMode.VERIFICATION).to_dict()["mode"])


if __name__ == '__main__':
    unittest.main()
