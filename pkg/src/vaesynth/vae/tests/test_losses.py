import unittest

import numpy as np

from vaesynth.numcore.gradcheck import grad_check
from vaesynth.numcore.params import ParamSet
from vaesynth.numcore.tensor import NumericMode, ShapeError
from vaesynth.vae.config import TrainConfig
from vaesynth.vae.losses import kld_gaussian, reconstruction_loss, total_training_loss, weight_decay_loss
from vaesynth.vae.model import VaeModel, decode, encode, reparameterize


def param_set(*values) -> ParamSet:
    ps = ParamSet(NumericMode.VERIFICATION)
    for i, v in enumerate(values):
        ps.add(f"p{i}", v)
    return ps


class TestReconstructionLoss(unittest.TestCase):

    def test_identity(self):
        x = np.random.default_rng(0).uniform(size=(2, 1, 4, 4))
        self.assertEqual(0.0, reconstruction_loss(x, x.copy()).item())

    def test_formula(self):
        self.assertAlmostEqual(1.0, reconstruction_loss(np.array([1.0, 0.0]), np.array([0.0, 1.0])).item())

    def test_loop_oracle(self):
        rng = np.random.default_rng(1)
        x = rng.uniform(size=(3, 1, 5, 5))
        y = rng.uniform(size=(3, 1, 5, 5))
        total = 0.0
        for a, b in zip(x.reshape(-1), y.reshape(-1)):
            total += (a - b) ** 2
        self.assertAlmostEqual(total / x.size, reconstruction_loss(x, y).item(), delta=1e-6 * total / x.size)

    def test_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            reconstruction_loss(np.zeros((1, 4)), np.zeros((1, 5)))


class TestWeightDecayLoss(unittest.TestCase):

    def test_worked_example(self):
        self.assertEqual(0.004, weight_decay_loss(param_set([2.0]), 0.001).item())

    def test_disabled(self):
        self.assertEqual(0.0, weight_decay_loss(param_set([1.0, -3.0], [[4.0]]), 0.0).item())

    def test_sum_over_parameters(self):
        self.assertAlmostEqual(7.0, weight_decay_loss(param_set([1.0, 2.0], [3.0]), 0.5).item())

    def test_negative_lambda(self):
        with self.assertRaises(ValueError):
            weight_decay_loss(param_set([1.0]), -0.1)


class TestKld(unittest.TestCase):

    def test_prior(self):
        self.assertEqual(0.0, kld_gaussian(np.zeros((1, 3)), np.zeros((1, 3))).item())

    def test_unit_mean(self):
        self.assertAlmostEqual(0.5, kld_gaussian(np.array([1.0]), np.array([0.0])).item())

    def test_monte_carlo(self):
        mu, logvar = 0.7, -0.4
        eps = np.random.default_rng(5).standard_normal(1000000)
        z = mu + np.exp(0.5 * logvar) * eps
        # log q(z) - log p(z), the 2π terms cancel
        estimate = np.mean(-0.5 * logvar - 0.5 * eps ** 2 + 0.5 * z ** 2)
        self.assertAlmostEqual(estimate, kld_gaussian(np.array([mu]), np.array([logvar])).item(), delta=1e-2)

    def test_non_negative(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            mu = rng.normal(size=(4, 3))
            logvar = rng.uniform(-5, 5, size=(4, 3))
            self.assertGreaterEqual(kld_gaussian(mu, logvar).item(), 0.0)

    def test_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            kld_gaussian(np.zeros((1, 2)), np.zeros((1, 3)))


class TestTotalTrainingLoss(unittest.TestCase):

    def test_perfect_reconstruction(self):
        x = np.ones((1, 4))
        total, parts = total_training_loss(x, x.copy(), param_set([5.0]),
                                           TrainConfig(lambda_wd=0.0, beta_kld=0.0))
        self.assertEqual(0.0, total.item())
        self.assertEqual(0.0, parts.total)

    def test_additivity(self):
        total, parts = total_training_loss(np.array([1.0, 0.0]), np.array([0.0, 1.0]), param_set([2.0]),
                                           TrainConfig(lambda_wd=0.001, beta_kld=0.0))
        self.assertAlmostEqual(1.004, total.item())
        self.assertAlmostEqual(1.0, parts.reconstruction)
        self.assertAlmostEqual(0.004, parts.weight_decay)

    def test_kld_weighting(self):
        rng = np.random.default_rng(2)
        x, y = rng.uniform(size=(2, 6)), rng.uniform(size=(2, 6))
        latent = reparameterize(rng.normal(size=(2, 3)), rng.normal(size=(2, 3)), eps=rng.normal(size=(2, 3)))
        cfg = TrainConfig(lambda_wd=0.01, beta_kld=0.5)
        _, parts = total_training_loss(x, y, param_set(rng.normal(size=5)), cfg, latent=latent)
        expected = parts.reconstruction + parts.weight_decay + 0.5 * parts.kld
        self.assertAlmostEqual(expected, parts.total, delta=1e-6 * expected)
        self.assertGreater(parts.kld, 0.0)

    def test_kld_reported_but_not_trained(self):
        rng = np.random.default_rng(3)
        x, y = rng.uniform(size=(1, 4)), rng.uniform(size=(1, 4))
        latent = reparameterize(np.ones((1, 2)), np.zeros((1, 2)), eps=np.zeros((1, 2)))
        _, parts = total_training_loss(x, y, param_set([1.0]), TrainConfig(lambda_wd=0.0, beta_kld=0.0),
                                       latent=latent)
        self.assertAlmostEqual(1.0, parts.kld)
        self.assertAlmostEqual(parts.reconstruction, parts.total)

    def test_beta_needs_latent(self):
        with self.assertRaises(ValueError):
            total_training_loss(np.zeros((1, 2)), np.zeros((1, 2)), param_set([1.0]), TrainConfig(beta_kld=1.0))

    def test_gradient_of_full_objective(self):
        model = VaeModel.create(image_side=8, latent_dim=4, mode=NumericMode.VERIFICATION, seed=3)
        rng = np.random.default_rng(4)
        x = rng.uniform(size=(1, 1, 8, 8))
        eps = rng.standard_normal((1, 4))
        cfg = TrainConfig(lambda_wd=1e-3, beta_kld=1.0, mode=NumericMode.VERIFICATION)

        def objective(tape):
            mu, logvar = encode(model, x, tape)
            latent = reparameterize(mu, logvar, eps=eps, tape=tape)
            y = decode(model, latent.z, tape)
            total, _ = total_training_loss(x, y, model.params, cfg, latent=latent, tape=tape)
            return total

        report = grad_check(objective, model.params)
        self.assertEqual(model.param_count(), report.checked)
        self.assertLess(report.max_rel_error, 1e-4, report.worst_parameter)


if __name__ == '__main__':
    unittest.main()
