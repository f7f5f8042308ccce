import logging
from pathlib import Path
from typing import List

import numpy as np

from vaesynth.dataio.manifest import DatasetManifest
from vaesynth.synthgen.generator import GenerationReport, expand_dataset

logger = logging.getLogger(__name__)

DEFAULT_MAX_DEGREES = 30.0
_SNAP = 1e-12


def rotate_image(image: np.ndarray, degrees: float) -> np.ndarray:
    """
    Rotate an image about its center with bilinear sampling; samples outside the image are 0.

    Right angles are exact: cos and sin values below 1e-12 in magnitude are snapped to 0.

    :param image: (height, width) array.
    :param degrees: Counter-clockwise angle.
    :return: The rotated image, same shape and dtype.
    """
    img = np.asarray(image)
    h, w = img.shape
    theta = np.deg2rad(degrees)
    c, s = np.cos(theta), np.sin(theta)
    c = 0.0 if abs(c) < _SNAP else c
    s = 0.0 if abs(s) < _SNAP else s
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    dy, dx = np.meshgrid(np.arange(h) - cy, np.arange(w) - cx, indexing="ij")
    sx = c * dx - s * dy + cx
    sy = s * dx + c * dy + cy
    y0 = np.floor(sy).astype(np.int64)
    x0 = np.floor(sx).astype(np.int64)
    fy = sy - y0
    fx = sx - x0
    out = np.zeros((h, w))
    for oy, ox, weight in ((0, 0, (1 - fy) * (1 - fx)), (0, 1, (1 - fy) * fx),
                           (1, 0, fy * (1 - fx)), (1, 1, fy * fx)):
        yy, xx = y0 + oy, x0 + ox
        inside = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
        values = np.zeros((h, w))
        values[inside] = img[yy[inside], xx[inside]]
        out += weight * values
    return out.astype(img.dtype)


def rotation_variants(max_degrees: float):

    def make(x: np.ndarray, gen: np.random.Generator, k: int) -> List[np.ndarray]:
        angles = gen.uniform(-max_degrees, max_degrees, size=k)
        return [rotate_image(x, a) for a in angles]

    return make


def baseline_rotate_augment(manifest: DatasetManifest, num_images_per_sample: int, out_root: Path, seed: int,
                            max_degrees: float = DEFAULT_MAX_DEGREES, image_side: int = 64) -> GenerationReport:
    """
    Fixed-rule baseline: expand every class with randomly rotated copies of its originals.

    Angles are uniform in [-max_degrees, max_degrees]. Layout and counts are those of
    `generate_synthetic_dataset`, with variants named ``<stem>_rot_<j>.pgm``.

    :raises ValueError: If max_degrees is not in (0, 180].
    """
    if not 0 < max_degrees <= 180:
        raise ValueError(f"max_degrees must be in (0, 180], got {max_degrees}")
    logger.info("rotating %d copies per original by up to %.1f degrees", num_images_per_sample, max_degrees)
    return expand_dataset(manifest, out_root, num_images_per_sample, seed, image_side,
                          rotation_variants(max_degrees), method="rotation", tag="rot")
