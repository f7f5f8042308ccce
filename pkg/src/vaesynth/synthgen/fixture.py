"""
Procedural stand-in corpus: one geometric pattern per class plus seeded Gaussian pixel noise.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np

from vaesynth.dataio.io import ensure_writable_dir
from vaesynth.dataio.manifest import DatasetManifest, scan_manifest
from vaesynth.dataio.pgm import write_pgm
from vaesynth.numcore.rng import Rng
from vaesynth.synthgen.preprocess import quantize

logger = logging.getLogger(__name__)

BACKGROUND = 0.2
FEATURE = 0.9
DEFAULT_CLASSES = ("top", "bottom", "side", "cross", "clean")


@dataclass
class FixtureSpec:
    """
    Attributes:
        classes (Tuple[str, ...]): Patterns to render, a subset of DEFAULT_CLASSES.
        n_per_class (int): Images per class.
        image_side (int): Side of the square images.
        noise_amplitude (float): Standard deviation of the pixel noise.
        seed (int): Noise seed.
    """
    classes: Tuple[str, ...] = DEFAULT_CLASSES
    n_per_class: int = 10
    image_side: int = 64
    noise_amplitude: float = 0.05
    seed: int = 0

    def __post_init__(self):
        self.classes = tuple(self.classes)
        unknown = [c for c in self.classes if c not in DEFAULT_CLASSES]
        if unknown:
            raise ValueError(f"Unknown fixture classes: {', '.join(unknown)}")
        if len(set(self.classes)) != len(self.classes):
            raise ValueError("Fixture classes must be unique")
        if self.n_per_class < 1:
            raise ValueError(f"n_per_class must be >= 1, got {self.n_per_class}")
        if self.image_side < 8:
            raise ValueError(f"image_side must be >= 8, got {self.image_side}")
        if self.noise_amplitude < 0:
            raise ValueError(f"noise_amplitude must be >= 0, got {self.noise_amplitude}")


def render_pattern(name: str, side: int) -> np.ndarray:
    """Noise-free pattern of a class as a (side, side) array in [0, 1]."""
    img = np.full((side, side), BACKGROUND)
    quarter = side // 4
    if name == "top":
        img[:quarter, :] = FEATURE
    elif name == "bottom":
        img[side - quarter:, :] = FEATURE
    elif name == "side":
        img[:, :quarter] = FEATURE
    elif name == "cross":
        width = max(side // 8, 1)
        start = side // 2 - width // 2
        img[start:start + width, :] = FEATURE
        img[:, start:start + width] = FEATURE
    elif name != "clean":
        raise ValueError(f"Unknown fixture class: {name}")
    return img


def make_fixture_dataset(spec: FixtureSpec, out_root: Path, stream: str = "fixture") -> DatasetManifest:
    """
    Render the fixture corpus as ``<out_root>/<class>/<class>_<i>.pgm``.

    The noise of a class is drawn from the stream ``<stream>/<class>`` of ``spec.seed``, so different
    stream names give independent corpora of the same classes.

    :param spec: What to render.
    :param out_root: Output directory, created if needed.
    :param stream: Stream name prefix.
    :return: The manifest of the written corpus.
    """
    out_root = ensure_writable_dir(out_root)
    rng = Rng(spec.seed)
    for name in spec.classes:
        gen = rng.stream(f"{stream}/{name}")
        pattern = render_pattern(name, spec.image_side)
        class_dir = out_root / name
        class_dir.mkdir(exist_ok=True)
        for i in range(spec.n_per_class):
            noise = gen.standard_normal(pattern.shape) * spec.noise_amplitude
            write_pgm(quantize(np.clip(pattern + noise, 0.0, 1.0)), class_dir / f"{name}_{i:03d}.pgm")
    logger.info("rendered %d classes x %d images of %dx%d into %s", len(spec.classes), spec.n_per_class,
                spec.image_side, spec.image_side, out_root)
    return scan_manifest(out_root)
