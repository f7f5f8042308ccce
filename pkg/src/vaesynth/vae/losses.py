from dataclasses import dataclass
from typing import Tuple

from vaesynth.numcore.params import ParamSet
from vaesynth.numcore.tape import Tape
from vaesynth.numcore.tensor import ShapeError, Tensor, as_tensor
from vaesynth.vae.config import TrainConfig
from vaesynth.vae.model import LatentCode


@dataclass
class LossComponents:
    reconstruction: float
    weight_decay: float
    kld: float
    total: float


def reconstruction_loss(x, x_prime, tape: Tape | None = None) -> Tensor:
    """
    Mean squared difference (1/N)·‖x − x′‖² over all pixels of the batch.

    :raises ShapeError: If the shapes differ.
    """
    t = tape if tape is not None else Tape(enabled=False)
    x, x_prime = as_tensor(x), as_tensor(x_prime)
    if x.shape != x_prime.shape:
        raise ShapeError(f"reconstruction_loss: shapes differ, {x.shape} and {x_prime.shape}")
    return t.apply("mean_square_diff", x_prime, x)


def weight_decay_loss(params: ParamSet, lambda_wd: float, tape: Tape | None = None) -> Tensor:
    """
    λ·Σ param² over every element of every parameter.

    :raises ValueError: If `lambda_wd` is negative.
    """
    if lambda_wd < 0:
        raise ValueError(f"lambda_wd must be >= 0, got {lambda_wd}")
    t = tape if tape is not None else Tape(enabled=False)
    if len(params) == 0:
        return Tensor(0.0, dtype=params.mode.dtype)
    squares = [t.apply("sum_square", p) for p in params.values()]
    return t.apply("scale", t.apply("add", *squares), factor=lambda_wd)


def kld_gaussian(mu, logvar, tape: Tape | None = None) -> Tensor:
    """
    −0.5·Σ(1 + logvar − mu² − exp(logvar)) per input, averaged over the batch.

    :raises ShapeError: If mu and logvar differ in shape.
    """
    t = tape if tape is not None else Tape(enabled=False)
    return t.apply("kld_gaussian", mu, logvar)


def total_training_loss(x, x_prime, params: ParamSet, cfg: TrainConfig, latent: LatentCode | None = None,
                        tape: Tape | None = None) -> Tuple[Tensor, LossComponents]:
    """
    Training objective L_reconstruction + L_wd + beta_kld·KLD.

    The KLD is reported whenever `latent` is given, but it only enters the objective when beta_kld > 0.

    :param x: Input images.
    :param x_prime: Reconstructions.
    :param params: Model parameters.
    :param cfg: Supplies lambda_wd and beta_kld.
    :param latent: The latent code of the batch.
    :param tape: Tape to record on.
    :return: The total as a scalar tensor and the value of every component.
    :raises ValueError: If beta_kld > 0 and no latent code is given.
    """
    t = tape if tape is not None else Tape(enabled=False)
    rec = reconstruction_loss(x, x_prime, t)
    wd = weight_decay_loss(params, cfg.lambda_wd, t)
    terms = [rec, wd]
    kld_value = 0.0
    if latent is not None:
        if cfg.beta_kld > 0:
            kld = kld_gaussian(latent.mu, latent.logvar, t)
            terms.append(t.apply("scale", kld, factor=cfg.beta_kld))
        else:
            kld = kld_gaussian(latent.mu, latent.logvar)
        kld_value = kld.item()
    elif cfg.beta_kld > 0:
        raise ValueError("beta_kld > 0 needs the latent code of the batch")
    total = t.apply("add", *terms)
    return total, LossComponents(rec.item(), wd.item(), kld_value, total.item())
