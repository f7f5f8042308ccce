import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Tuple

from vaesynth.dataio.manifest import DatasetManifest
from vaesynth.numcore.rng import Rng, derive_seed

logger = logging.getLogger(__name__)

MIN_CLASS_SIZE = 3
_RATIO_DENOMINATOR = 10 ** 6


@dataclass
class SplitSpec:
    """
    Train/validation/test ratios of a stratified split.

    Attributes:
        train (float): Fraction of every class assigned to training, > 0.
        val (float): Fraction assigned to validation, > 0.
        test (float): Fraction assigned to testing, > 0.
        seed (int): Seed of the per-class shuffle.
    """
    train: float = 0.8
    val: float = 0.1
    test: float = 0.1
    seed: int = 0

    def __post_init__(self):
        for name, r in (("train", self.train), ("val", self.val), ("test", self.test)):
            if not r > 0:
                raise ValueError(f"Split ratio {name} must be > 0, got {r}")
        if abs(self.train + self.val + self.test - 1.0) > 1e-9:
            raise ValueError(f"Split ratios must sum to 1, got {self.train} + {self.val} + {self.test}")

    def fractions(self) -> List[Fraction]:
        return [Fraction(r).limit_denominator(_RATIO_DENOMINATOR) for r in (self.train, self.val, self.test)]


def allocate(n: int, ratios: List[Fraction]) -> List[int]:
    """
    Largest-remainder allocation of `n` items over `ratios`.

    Every part gets floor(n·r); the items left over go one each to the parts with the largest
    fractional remainder, earlier parts first on ties.
    """
    quotas = [n * r / sum(ratios) for r in ratios]
    counts = [int(q) for q in quotas]
    order = sorted(range(len(ratios)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:n - sum(counts)]:
        counts[i] += 1
    return counts


def stratified_split(manifest: DatasetManifest, spec: SplitSpec) -> Tuple[DatasetManifest, DatasetManifest,
                                                                            DatasetManifest]:
    """
    Split every class of a dataset in train, validation and test parts.

    The files of a class are shuffled with the ``split/<class>`` stream of ``spec.seed`` and cut into
    contiguous slices sized by `allocate`. The three manifests partition the input.

    :param manifest: The dataset.
    :param spec: Ratios and seed.
    :return: (train, val, test)
    :raises ValueError: If a class has fewer than 3 images.
    """
    rng = Rng(spec.seed)
    ratios = spec.fractions()
    parts: List[Dict[str, List[Path]]] = [{}, {}, {}]
    for name in manifest.classes:
        files = manifest.files[name]
        if len(files) < MIN_CLASS_SIZE:
            raise ValueError(f"Class {name} has {len(files)} image(s), a split needs at least {MIN_CLASS_SIZE}")
        order = rng.stream(f"split/{name}").permutation(len(files))
        shuffled = [files[i] for i in order]
        start = 0
        for part, count in zip(parts, allocate(len(files), ratios)):
            part[name] = shuffled[start:start + count]
            start += count
    train, val, test = (manifest.with_files(p) for p in parts)
    logger.info("split %d images into %d / %d / %d", manifest.total, train.total, val.total, test.total)
    return train, val, test


def stratified_split_by_origin(manifest: DatasetManifest, spec: SplitSpec,
                               original_suffix: str = "_orig") -> Tuple[DatasetManifest, DatasetManifest,
                                                                        DatasetManifest]:
    """
    Split original and synthetic files of a generated dataset separately and merge the parts.

    Every part then holds originals and synthetics of every class in the configured ratios.
    Originals are recognized by the stem suffix `original_suffix`.

    :raises ValueError: If a class has fewer than 3 originals or fewer than 3 synthetics.
    """
    groups = {"original": {}, "synthetic": {}}
    for name in manifest.classes:
        files = manifest.files[name]
        groups["original"][name] = [p for p in files if p.stem.endswith(original_suffix)]
        groups["synthetic"][name] = [p for p in files if not p.stem.endswith(original_suffix)]
    merged: List[Dict[str, List[Path]]] = [{c: [] for c in manifest.classes} for _ in range(3)]
    for group, files in groups.items():
        sub = SplitSpec(spec.train, spec.val, spec.test, derive_seed(spec.seed, group))
        try:
            parts = stratified_split(manifest.with_files(files), sub)
        except ValueError as e:
            raise ValueError(f"{group} images: {e}") from e
        for target, part in zip(merged, parts):
            for name in manifest.classes:
                target[name].extend(part.files[name])
    return tuple(manifest.with_files({c: sorted(files[c]) for c in files}) for files in merged)
