"""
Binary model container.

Layout, little-endian:

    b"VAE1"        magic
    u8             numeric mode (32 or 64)
    u32 u32        image side, latent dimension
    f32 * P        every parameter in ParamSet order, row-major

The parameter names and shapes follow from the dimensions. A verification mode (64) file stores
f64 values instead.
"""
import logging
import struct
from pathlib import Path

import numpy as np

from vaesynth.numcore.params import ParamSet
from vaesynth.numcore.tensor import NumericMode
from vaesynth.vae.model import VaeModel, architecture

logger = logging.getLogger(__name__)

MAGIC = b"VAE1"
_HEADER = struct.Struct("<4sBII")


class ModelFormatError(ValueError):
    """Raised when a model file is corrupt, truncated or of an unknown version."""


def _value_dtype(mode: NumericMode) -> str:
    return "<f4" if mode is NumericMode.STANDARD else "<f8"


def encode_model(model: VaeModel) -> bytes:
    mode = model.mode
    parts = [_HEADER.pack(MAGIC, mode.code, model.image_side, model.latent_dim)]
    for p in model.params.values():
        parts.append(p.data.astype(_value_dtype(mode)).tobytes(order="C"))
    return b"".join(parts)


class _Reader:

    def __init__(self, buf: bytes):
        self.buf = buf
        self.offset = 0

    def take(self, n: int, what: str) -> bytes:
        if self.offset + n > len(self.buf):
            raise ModelFormatError(f"Truncated model file: {what} at byte {self.offset} needs {n} bytes, "
                                   f"{len(self.buf) - self.offset} left")
        chunk = self.buf[self.offset:self.offset + n]
        self.offset += n
        return chunk


def decode_model(buf: bytes) -> VaeModel:
    """
    Parse a model container.

    :raises ModelFormatError: If the bytes are not a complete, consistent model.
    """
    r = _Reader(buf)
    magic, code, side, latent_dim = _HEADER.unpack(r.take(_HEADER.size, "header"))
    if magic != MAGIC:
        raise ModelFormatError(f"Not a model file or unsupported version: magic {magic!r}")
    try:
        mode = NumericMode.from_code(code)
        expected = architecture(side, latent_dim)
    except ValueError as e:
        raise ModelFormatError(str(e)) from e
    dtype = np.dtype(_value_dtype(mode))
    params = ParamSet(mode)
    for name, shape in expected:
        size = int(np.prod(shape))
        values = np.frombuffer(r.take(size * dtype.itemsize, f"values of {name}"), dtype=dtype)
        params.add(name, values.reshape(shape).astype(mode.dtype))
    if r.offset != len(buf):
        raise ModelFormatError(f"{len(buf) - r.offset} trailing bytes after the last parameter")
    return VaeModel(params, side, latent_dim)


def save_model(model: VaeModel, path: Path) -> None:
    """
    Write a model to `path`.

    :param model: The model.
    :param path: Destination file; its parent directory must exist.
    """
    Path(path).write_bytes(encode_model(model))
    logger.info("saved %r to %s", model, path)


def load_model(path: Path) -> VaeModel:
    """
    Read a model written by `save_model`. Loading never returns a partially filled model.

    :param path: Model file.
    :return: The model with the dimensions and numeric mode stored in the file.
    :raises ModelFormatError: If the file is corrupt, truncated or of another version.
    :raises IOError: If the file cannot be read.
    """
    model = decode_model(Path(path).read_bytes())
    logger.info("loaded %r from %s", model, path)
    return model
