"""
Convolutional VAE built from the numcore operator set.

Encoder: conv 1→16 (3×3, stride 2, pad 1) → ReLU → conv 16→32 (3×3, stride 2, pad 1) → ReLU → flatten →
dense → (mu ‖ logvar). Decoder: dense → ReLU → reshape to 32 × side/4 × side/4 → [upsample 2× + conv 3×3 + ReLU]
twice (32→16→8 channels) → conv 8→1 → sigmoid.
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from vaesynth.numcore.params import ParamSet
from vaesynth.numcore.rng import Rng
from vaesynth.numcore.tape import Tape
from vaesynth.numcore.tensor import NumericMode, ShapeError, Tensor

logger = logging.getLogger(__name__)

DEFAULT_IMAGE_SIDE = 64
DEFAULT_LATENT_DIM = 32
LOGVAR_MIN = -10.0
LOGVAR_MAX = 10.0
ENCODER_CHANNELS = (16, 32)
DECODER_CHANNELS = (16, 8)
KERNEL = 3


def architecture(image_side: int, latent_dim: int) -> List[Tuple[str, Tuple[int, ...]]]:
    """
    Ordered parameter names and shapes of a model.

    :param image_side: Image side in pixels, a multiple of 4.
    :param latent_dim: Latent dimension d.
    :raises ValueError: If the dimensions are not supported.
    """
    if image_side < 4 or image_side % 4 != 0:
        raise ValueError(f"Image side must be a positive multiple of 4, got {image_side}")
    if latent_dim < 1:
        raise ValueError(f"Latent dimension must be positive, got {latent_dim}")
    c1, c2 = ENCODER_CHANNELS
    d1, d2 = DECODER_CHANNELS
    flat = c2 * (image_side // 4) ** 2
    return [
        ("enc.conv1.w", (c1, 1, KERNEL, KERNEL)),
        ("enc.conv1.b", (c1,)),
        ("enc.conv2.w", (c2, c1, KERNEL, KERNEL)),
        ("enc.conv2.b", (c2,)),
        ("enc.dense.w", (flat, 2 * latent_dim)),
        ("enc.dense.b", (2 * latent_dim,)),
        ("dec.dense.w", (latent_dim, flat)),
        ("dec.dense.b", (flat,)),
        ("dec.conv1.w", (d1, c2, KERNEL, KERNEL)),
        ("dec.conv1.b", (d1,)),
        ("dec.conv2.w", (d2, d1, KERNEL, KERNEL)),
        ("dec.conv2.b", (d2,)),
        ("dec.out.w", (1, d2, KERNEL, KERNEL)),
        ("dec.out.b", (1,)),
    ]


@dataclass
class LatentCode:
    """
    Latent distribution parameters and one sample of an input batch.

    Attributes:
        mu (Tensor): (B, d) means.
        logvar (Tensor): (B, d) log-variances, clamped to [-10, 10].
        z (Tensor): (B, d) sample mu + exp(0.5 logvar) * eps.
        eps (np.ndarray): The standard normal draw used for z.
    """
    mu: Tensor
    logvar: Tensor
    z: Tensor
    eps: np.ndarray


class VaeModel:
    """
    Encoder and decoder parameters of the VAE together with its dimensions.

    Example Usage:
        model = VaeModel.create(image_side=64, latent_dim=32, seed=1)
        mu, logvar = encode(model, images)
        y = decode(model, mu)
    """

    def __init__(self, params: ParamSet, image_side: int, latent_dim: int):
        self.params = params
        self.image_side = image_side
        self.latent_dim = latent_dim

    @property
    def mode(self) -> NumericMode:
        return self.params.mode

    @property
    def dtype(self):
        return self.params.mode.dtype

    @classmethod
    def create(cls, image_side: int = DEFAULT_IMAGE_SIDE, latent_dim: int = DEFAULT_LATENT_DIM,
               mode: NumericMode = NumericMode.STANDARD, seed: int = 0) -> 'VaeModel':
        """
        Create a model with He-normal weights and zero biases drawn from the ``init`` stream of `seed`.

        :param image_side: Image side in pixels.
        :param latent_dim: Latent dimension d.
        :param mode: Numeric mode of the parameters.
        :param seed: Initialization seed.
        """
        gen = Rng(seed).stream("init")
        params = ParamSet(mode)
        for name, shape in architecture(image_side, latent_dim):
            if name.endswith(".b"):
                params.add(name, np.zeros(shape))
                continue
            fan_in = shape[0] if len(shape) == 2 else int(np.prod(shape[1:]))
            params.add(name, gen.standard_normal(shape) * np.sqrt(2.0 / fan_in))
        # keep the initial log-variances near zero
        params["enc.dense.w"].data[:, latent_dim:] *= 0.1
        return cls(params, image_side, latent_dim)

    def copy(self) -> 'VaeModel':
        return VaeModel(self.params.copy(), self.image_side, self.latent_dim)

    def param_count(self) -> int:
        return sum(p.size for p in self.params.values())

    def __repr__(self):
        return f"VaeModel(image_side={self.image_side}, latent_dim={self.latent_dim}, mode={self.mode.value})"


def as_image_batch(model: VaeModel, x) -> Tensor:
    """
    Convert images to a (B, 1, side, side) tensor of the model dtype.

    :raises ShapeError: If the images do not have the model's side.
    """
    data = x.data if isinstance(x, Tensor) else np.asarray(x)
    s = model.image_side
    if data.ndim != 4 or data.shape[1:] != (1, s, s):
        raise ShapeError(f"encode: expected images of shape (B, 1, {s}, {s}), got {tuple(data.shape)}")
    return Tensor(data, dtype=model.dtype)


def encode(model: VaeModel, x, tape: Tape | None = None) -> Tuple[Tensor, Tensor]:
    """
    Map a batch of images to the parameters of their latent distributions.

    :param model: The model.
    :param x: Images of shape (B, 1, side, side) with values in [0, 1].
    :param tape: Tape to record on; evaluation when omitted.
    :return: (mu, logvar), each (B, d); logvar clamped to [-10, 10].
    :raises ShapeError: If the image side does not match the model.
    """
    t = tape if tape is not None else Tape(enabled=False)
    p = model.params
    x = as_image_batch(model, x)
    b = x.shape[0]
    h = x
    for layer in ("enc.conv1", "enc.conv2"):
        h = t.apply("conv2d", h, p[f"{layer}.w"], stride=2, padding=1)
        h = t.apply("relu", t.apply("add_bias", h, p[f"{layer}.b"]))
    h = t.apply("reshape", h, shape=(b, int(np.prod(h.shape[1:]))))
    out = t.apply("add_bias", t.apply("matmul", h, p["enc.dense.w"]), p["enc.dense.b"])
    d = model.latent_dim
    mu = t.apply("slice", out, start=0, stop=d)
    logvar = t.apply("clamp", t.apply("slice", out, start=d, stop=2 * d), lo=LOGVAR_MIN, hi=LOGVAR_MAX)
    return mu, logvar


def reparameterize(mu, logvar, rng: np.random.Generator | None = None, eps: np.ndarray | None = None,
                   tape: Tape | None = None) -> LatentCode:
    """
    Draw z = mu + exp(0.5 logvar) * eps with eps from a standard normal.

    :param mu: Means, (B, d) or (d,).
    :param logvar: Log-variances of the same shape.
    :param rng: Generator supplying eps.
    :param eps: Explicit noise instead of a draw from `rng`.
    :param tape: Tape to record on.
    :raises ShapeError: If the shapes of mu and logvar differ.
    """
    t = tape if tape is not None else Tape(enabled=False)
    mu = mu if isinstance(mu, Tensor) else Tensor(mu)
    logvar = logvar if isinstance(logvar, Tensor) else Tensor(logvar, dtype=mu.dtype)
    if mu.shape != logvar.shape:
        raise ShapeError(f"reparameterize: mu {mu.shape} and logvar {logvar.shape} differ")
    if eps is None:
        if rng is None:
            raise ValueError("reparameterize needs either an rng or an explicit eps")
        eps = rng.standard_normal(mu.shape)
    eps = np.asarray(eps, dtype=mu.dtype)
    z = t.apply("reparameterize", mu, logvar, eps=eps)
    return LatentCode(mu, logvar, z, eps)


def decode(model: VaeModel, z, tape: Tape | None = None) -> Tensor:
    """
    Map latent vectors to images.

    :param model: The model.
    :param z: Latent vectors, (B, d) or a single (d,) vector.
    :param tape: Tape to record on; evaluation when omitted.
    :return: Images (B, 1, side, side) with values in [0, 1].
    :raises ShapeError: If the latent length is not d.
    """
    t = tape if tape is not None else Tape(enabled=False)
    p = model.params
    if not isinstance(z, Tensor) or (z.dtype != model.dtype and not z.requires_grad):
        z = Tensor(z, dtype=model.dtype)
    if z.data.ndim == 1:
        z = t.apply("reshape", z, shape=(1, z.shape[0]))
    if z.data.ndim != 2 or z.shape[1] != model.latent_dim:
        raise ShapeError(f"decode: expected latent vectors of length {model.latent_dim}, got shape {z.shape}")
    b = z.shape[0]
    q = model.image_side // 4
    h = t.apply("relu", t.apply("add_bias", t.apply("matmul", z, p["dec.dense.w"]), p["dec.dense.b"]))
    h = t.apply("reshape", h, shape=(b, ENCODER_CHANNELS[1], q, q))
    for layer in ("dec.conv1", "dec.conv2"):
        h = t.apply("upsample2x_nearest", h)
        h = t.apply("conv2d", h, p[f"{layer}.w"], stride=1, padding=1)
        h = t.apply("relu", t.apply("add_bias", h, p[f"{layer}.b"]))
    h = t.apply("add_bias", t.apply("conv2d", h, p["dec.out.w"], stride=1, padding=1), p["dec.out.b"])
    return t.apply("sigmoid", h)
