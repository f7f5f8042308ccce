import logging
from typing import Tuple

import numpy as np

from vaesynth.numcore.optim import adam_step
from vaesynth.numcore.rng import Rng
from vaesynth.numcore.tape import Tape
from vaesynth.numcore.tensor import NonFiniteError
from vaesynth.vae.config import TrainConfig
from vaesynth.vae.loss_curve import LossCurve
from vaesynth.vae.losses import kld_gaussian, reconstruction_loss, total_training_loss
from vaesynth.vae.model import VaeModel, decode, encode, reparameterize

logger = logging.getLogger(__name__)

EVAL_SEED = 20240101


class TrainingDivergedError(ArithmeticError):
    """Raised when the training loss becomes NaN or infinite."""


def _as_dataset(model: VaeModel, images, name: str) -> np.ndarray:
    x = np.asarray(images, dtype=model.dtype)
    if x.shape[0] == 0:
        raise ValueError(f"The {name} set is empty")
    return x


def train(model: VaeModel, train_set, cfg: TrainConfig) -> Tuple[VaeModel, LossCurve]:
    """
    Train a copy of a model with shuffled minibatches.

    Every step runs encode → reparameterize → decode → total_training_loss → backward → adam_step.
    Batch order comes from the ``shuffle`` stream and latent noise from the ``reparam`` stream of
    ``Rng(cfg.seed)``, so a fixed seed reproduces the run bit for bit.

    :param model: Initial model; left untouched.
    :param train_set: Images of shape (N, 1, side, side) with values in [0, 1].
    :param cfg: Training configuration.
    :return: The trained model and the per-epoch mean losses, weighted by batch size.
    :raises ValueError: If the training set is empty or its mode differs from the model's.
    :raises TrainingDivergedError: If a loss becomes non-finite.
    """
    if cfg.mode is not model.mode:
        raise ValueError(f"Training mode {cfg.mode.value} does not match model mode {model.mode.value}")
    x = _as_dataset(model, train_set, "training")
    n = x.shape[0]
    work = model.copy()
    rng = Rng(cfg.seed)
    shuffle = rng.stream("shuffle")
    reparam = rng.stream("reparam")
    curve = LossCurve()
    logger.info("training %r on %d images for %d epochs", work, n, cfg.epochs)
    for epoch in range(1, cfg.epochs + 1):
        order = shuffle.permutation(n)
        sums = np.zeros(4)
        for batch, start in enumerate(range(0, n, cfg.batch_size), start=1):
            xb = x[order[start:start + cfg.batch_size]]
            tape = Tape()
            try:
                mu, logvar = encode(work, xb, tape)
                latent = reparameterize(mu, logvar, rng=reparam, tape=tape)
                y = decode(work, latent.z, tape)
                total, parts = total_training_loss(xb, y, work.params, cfg, latent=latent, tape=tape)
            except NonFiniteError as e:
                raise TrainingDivergedError(f"Non-finite value in epoch {epoch}, batch {batch}: {e}") from e
            if not np.isfinite(parts.total):
                raise TrainingDivergedError(f"Non-finite loss in epoch {epoch}, batch {batch}")
            tape.backward(total)
            adam_step(work.params, lr=cfg.learning_rate)
            sums += xb.shape[0] * np.array([parts.total, parts.reconstruction, parts.weight_decay, parts.kld])
        means = sums / n
        curve.add(epoch, *means.tolist())
        logger.info("epoch %d/%d: total %.6f reconstruction %.6f weight decay %.6f kld %.6f",
                    epoch, cfg.epochs, *means)
    return work, curve


def evaluate_test_loss(model: VaeModel, test_set, seed: int = EVAL_SEED) -> Tuple[float, float, float]:
    """
    Test loss of a model: reconstruction through a sampled latent code plus the KL divergence.

    The latent noise comes from the ``eval`` stream of `seed`; the model is not changed.

    :param model: The model.
    :param test_set: Images of shape (N, 1, side, side).
    :param seed: Evaluation seed.
    :return: (reconstruction, kld, reconstruction + kld)
    :raises ValueError: If the test set is empty.
    """
    x = _as_dataset(model, test_set, "test")
    gen = Rng(seed).stream("eval")
    mu, logvar = encode(model, x)
    latent = reparameterize(mu, logvar, rng=gen)
    y = decode(model, latent.z)
    rec = reconstruction_loss(x, y).item()
    kld = kld_gaussian(mu, logvar).item()
    return rec, kld, rec + kld
