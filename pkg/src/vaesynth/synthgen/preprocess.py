import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List

import numpy as np

from vaesynth.dataio.manifest import DatasetManifest
from vaesynth.dataio.pgm import GrayImage, read_pgm

logger = logging.getLogger(__name__)


def _area_weights(n_in: int, n_out: int) -> np.ndarray:
    """(n_out, n_in) matrix whose rows average the input cells covered by each output cell."""
    scale = n_in / n_out
    lo = np.arange(n_out)[:, None] * scale
    hi = lo + scale
    cells = np.arange(n_in)[None, :]
    overlap = np.clip(np.minimum(hi, cells + 1) - np.maximum(lo, cells), 0.0, None)
    return overlap / scale


def preprocess_image(raw, target_side: int) -> np.ndarray:
    """
    Resize an 8-bit grayscale image by area averaging and scale it to [0, 1].

    :param raw: A GrayImage or a 2-D uint8 array.
    :param target_side: Side of the square output.
    :return: float64 array of shape (target_side, target_side).
    :raises ValueError: If the image has a zero dimension.
    """
    pixels = raw.pixels if isinstance(raw, GrayImage) else np.asarray(raw)
    if pixels.ndim != 2 or pixels.shape[0] == 0 or pixels.shape[1] == 0:
        raise ValueError(f"Cannot preprocess an image of shape {pixels.shape}")
    if target_side < 1:
        raise ValueError(f"Target side must be positive, got {target_side}")
    img = pixels.astype(np.float64)
    h, w = img.shape
    if (h, w) != (target_side, target_side):
        img = _area_weights(h, target_side) @ img @ _area_weights(w, target_side).T
    return img / 255.0


def quantize(image: np.ndarray) -> GrayImage:
    """Map a [0, 1] image back to 8 bits with round(255 · v)."""
    return GrayImage.from_array(np.clip(np.rint(np.asarray(image) * 255.0), 0, 255).astype(np.uint8))


@dataclass
class LabeledImages:
    """
    Preprocessed images of a manifest with their class indices.

    Attributes:
        x (np.ndarray): (N, 1, side, side) images in [0, 1].
        y (np.ndarray): (N,) class indices into `classes`.
        classes (List[str]): Class names.
        paths (List[Path]): Source file of every image.
    """
    x: np.ndarray
    y: np.ndarray
    classes: List[str]
    paths: List[Path]

    def __len__(self):
        return self.y.shape[0]

    def of_class(self, name: str) -> np.ndarray:
        return self.x[self.y == self.classes.index(name)]


def load_labeled_images(manifest: DatasetManifest, image_side: int) -> LabeledImages:
    """
    Read and preprocess every image of a manifest, in class order then file order.

    :raises IOError: If a file cannot be read.
    :raises PgmFormatError: If a file is not a valid PGM.
    """
    pairs = manifest.labeled_files()
    x = np.zeros((len(pairs), 1, image_side, image_side))
    for i, (path, _) in enumerate(pairs):
        x[i, 0] = preprocess_image(read_pgm(path), image_side)
    y = np.array([label for _, label in pairs], dtype=np.int64)
    logger.info("loaded %d images of %d classes from %s", len(pairs), len(manifest.classes), manifest.root)
    return LabeledImages(x, y, list(manifest.classes), [p for p, _ in pairs])
