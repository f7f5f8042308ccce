"""
Synthetic dataset expansion.

For every class the original files are shuffled with the class stream, every original is
preprocessed, k variants are written as ``<stem>_<tag>_<j>.pgm`` and the original itself as
``<stem>_orig.pgm``, all inside ``<out_root>/<class>-reconstructed/``.
"""
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List

import numpy as np

from vaesynth.dataio.io import ensure_writable_dir
from vaesynth.dataio.manifest import DatasetManifest
from vaesynth.dataio.pgm import PgmFormatError, read_pgm, write_pgm
from vaesynth.numcore.rng import Rng
from vaesynth.synthgen.preprocess import preprocess_image, quantize
from vaesynth.vae.model import VaeModel, decode, encode, reparameterize

logger = logging.getLogger(__name__)

RECONSTRUCTED_SUFFIX = "-reconstructed"
REPORT_FILE = "report.json"
ORIGINAL_TAG = "orig"
DEFAULT_IMAGES_PER_SAMPLE = 9

# (preprocessed image, class generator, k) -> k images
VariantMaker = Callable[[np.ndarray, np.random.Generator, int], List[np.ndarray]]


@dataclass
class GenerationReport:
    """
    Outcome of a dataset expansion.

    Attributes:
        method (str): ``vae`` or ``rotation``.
        originals (Dict[str, int]): Originals processed per class.
        synthetics (Dict[str, int]): Variants written per class.
        out_root (Path): Output directory.
        duration (float): Wall-clock seconds.
        seed (int): Seed of the class streams.
        skipped (List[str]): Unreadable input files.
    """
    method: str
    originals: Dict[str, int]
    synthetics: Dict[str, int]
    out_root: Path
    duration: float
    seed: int
    skipped: List[str] = field(default_factory=list)

    @property
    def total_files(self) -> int:
        return sum(self.originals.values()) + sum(self.synthetics.values())

    def to_dict(self) -> Dict:
        return {
            "method": self.method,
            "seed": self.seed,
            "out_root": str(self.out_root),
            "duration_seconds": self.duration,
            "classes": {c: {"originals": self.originals[c], "synthetics": self.synthetics[c]}
                        for c in self.originals},
            "total_files": self.total_files,
            "skipped": list(self.skipped),
        }

    def to_json(self, path: Path) -> None:
        with open(path, "w", newline="\n") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")


def expand_dataset(manifest: DatasetManifest, out_root: Path, num_images_per_sample: int, seed: int,
                   image_side: int, make_variants: VariantMaker, method: str, tag: str) -> GenerationReport:
    """
    Write every original of a manifest plus `num_images_per_sample` variants of it.

    :param manifest: Input dataset.
    :param out_root: Output directory; checked for writability before anything is written.
    :param num_images_per_sample: Variants per original, k >= 0.
    :param seed: Seed of the per-class streams ``<method>/<class>``.
    :param image_side: Side the originals are resized to.
    :param make_variants: Produces the k variants of one preprocessed original.
    :param method: Method name recorded in the report and used as stream prefix.
    :param tag: File name tag of the variants.
    :return: The report, also written to ``<out_root>/report.json``.
    :raises ValueError: If k is negative.
    :raises IOError: If `out_root` cannot be written.
    """
    if num_images_per_sample < 0:
        raise ValueError(f"num_images_per_sample must be >= 0, got {num_images_per_sample}")
    start = time.perf_counter()
    out_root = ensure_writable_dir(out_root)
    rng = Rng(seed)
    originals: Dict[str, int] = {}
    synthetics: Dict[str, int] = {}
    skipped: List[str] = []
    for name in manifest.classes:
        gen = rng.stream(f"{method}/{name}")
        class_dir = out_root / f"{name}{RECONSTRUCTED_SUFFIX}"
        class_dir.mkdir(exist_ok=True)
        files = manifest.files[name]
        originals[name] = synthetics[name] = 0
        # the shuffled order only changes the processing order
        for idx in gen.permutation(len(files)):
            path = files[idx]
            try:
                raw = read_pgm(path)
            except (OSError, PgmFormatError) as e:
                logger.warning("skipping unreadable image %s: %s", path, e)
                skipped.append(str(path))
                continue
            x = preprocess_image(raw, image_side)
            variants = make_variants(x, gen, num_images_per_sample) if num_images_per_sample else []
            for j, v in enumerate(variants):
                write_pgm(quantize(v), class_dir / f"{path.stem}_{tag}_{j}.pgm")
            write_pgm(quantize(x), class_dir / f"{path.stem}_{ORIGINAL_TAG}.pgm")
            originals[name] += 1
            synthetics[name] += len(variants)
        logger.info("%s: %d originals, %d synthetics", name, originals[name], synthetics[name])
    report = GenerationReport(method, originals, synthetics, out_root, time.perf_counter() - start, seed, skipped)
    report.to_json(out_root / REPORT_FILE)
    return report


def vae_variants(model: VaeModel) -> VariantMaker:
    """Variants decoded from fresh latent samples z ~ q(z|x) of a model in evaluation mode."""

    def make(x: np.ndarray, gen: np.random.Generator, k: int) -> List[np.ndarray]:
        mu, logvar = encode(model, x[None, None])
        mus = np.repeat(mu.data, k, axis=0)
        logvars = np.repeat(logvar.data, k, axis=0)
        latent = reparameterize(mus, logvars, rng=gen)
        y = decode(model, latent.z)
        return [y.data[j, 0] for j in range(k)]

    return make


def generate_synthetic_dataset(manifest: DatasetManifest, model: VaeModel, num_images_per_sample: int,
                               out_root: Path, seed: int) -> GenerationReport:
    """
    Expand every class with VAE reconstructions of sampled latent codes.

    Every original is encoded once; each of its k variants decodes its own draw z = mu + σ·eps.

    :param manifest: Input dataset.
    :param model: Trained model; only read.
    :param num_images_per_sample: Synthetic images per original.
    :param out_root: Output directory.
    :param seed: Generation seed.
    :return: The generation report.
    """
    logger.info("generating %d synthetic images per original with %r", num_images_per_sample, model)
    return expand_dataset(manifest, out_root, num_images_per_sample, seed, model.image_side, vae_variants(model),
                          method="vae", tag="recon")


def interpolation_path(mu_a: np.ndarray, mu_b: np.ndarray, steps: int) -> List[np.ndarray]:
    """
    Points z_t = (1 - t)·mu_a + t·mu_b for `steps` evenly spaced t from 0 to 1.

    :raises ValueError: If steps < 2 or the vectors differ in shape.
    """
    if steps < 2:
        raise ValueError(f"Interpolation needs at least 2 steps, got {steps}")
    mu_a, mu_b = np.asarray(mu_a), np.asarray(mu_b)
    if mu_a.shape != mu_b.shape:
        raise ValueError(f"Latent vectors differ in shape: {mu_a.shape} and {mu_b.shape}")
    return [(1 - t) * mu_a + t * mu_b for t in (i / (steps - 1) for i in range(steps))]


def interpolate_latent(model: VaeModel, x_a: np.ndarray, x_b: np.ndarray, steps: int) -> List[np.ndarray]:
    """
    Decode the straight latent line between the means of two images.

    :param model: The model.
    :param x_a: First image, (side, side) in [0, 1].
    :param x_b: Second image.
    :param steps: Number of frames, >= 2; the first and last frames decode the exact means.
    :return: `steps` decoded (side, side) images.
    :raises ValueError: If steps < 2.
    """
    if steps < 2:
        raise ValueError(f"Interpolation needs at least 2 steps, got {steps}")
    mu_a = encode(model, np.asarray(x_a)[None, None])[0].data[0]
    mu_b = encode(model, np.asarray(x_b)[None, None])[0].data[0]
    return [decode(model, z).data[0, 0] for z in interpolation_path(mu_a, mu_b, steps)]
