import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple

from vaesynth.dataio.io import ls

logger = logging.getLogger(__name__)

PGM_SUFFIX = ".pgm"


@dataclass
class DatasetManifest:
    """
    Class list and per-class image files of a dataset laid out as one directory per class.

    Attributes:
        root (Path): The dataset directory.
        classes (List[str]): Class names, sorted.
        files (Dict[str, List[Path]]): Sorted image paths per class.
        ignored (int): Number of non-PGM files skipped while scanning.
    """
    root: Path
    classes: List[str]
    files: Dict[str, List[Path]]
    ignored: int = 0

    @property
    def counts(self) -> Dict[str, int]:
        return {c: len(self.files[c]) for c in self.classes}

    @property
    def total(self) -> int:
        return sum(len(self.files[c]) for c in self.classes)

    def labeled_files(self) -> List[Tuple[Path, int]]:
        """All (path, class index) pairs in class order, then file order."""
        return [(p, i) for i, c in enumerate(self.classes) for p in self.files[c]]

    def with_files(self, files: Dict[str, List[Path]]) -> 'DatasetManifest':
        """A manifest over the same root and classes holding the given files."""
        return DatasetManifest(self.root, list(self.classes), {c: list(files.get(c, [])) for c in self.classes})

    def to_dict(self) -> Dict:
        return {"root": str(self.root), "classes": list(self.classes), "counts": self.counts}

    def to_json(self, path: Path) -> None:
        """Write ``manifest.json`` (root, classes, counts)."""
        with open(path, "w", newline="\n") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")


def scan_manifest(root: Path, strip_suffix: str = "") -> DatasetManifest:
    """
    Build the manifest of a directory with one subdirectory per class.

    Only ``.pgm`` files are listed; other files inside class directories are ignored and counted.
    Files directly in `root` are not part of any class.

    :param root: The dataset directory.
    :param strip_suffix: Suffix removed from directory names to form class names, e.g. ``"-reconstructed"``.
    :return: The manifest.
    :raises IOError: If `root` does not exist.
    :raises ValueError: If there are no class directories or a class has no images.
    """
    root = Path(root)
    if not root.is_dir():
        raise IOError(f"Input directory does not exist: {root}")
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise ValueError(f"No class directories found in {root}")
    files: Dict[str, List[Path]] = {}
    ignored = 0
    for d in class_dirs:
        name = d.name
        if strip_suffix and name.endswith(strip_suffix):
            name = name[:-len(strip_suffix)]
        if name in files:
            raise ValueError(f"Duplicate class name {name} in {root}")
        all_files = ls(d, recursive=False)
        images = [p for p in all_files if p.suffix.lower() == PGM_SUFFIX]
        ignored += len(all_files) - len(images)
        if not images:
            raise ValueError(f"Class {name} has no images in {d}")
        files[name] = images
    if ignored:
        logger.warning("ignored %d non-PGM file(s) under %s", ignored, root)
    classes = sorted(files)
    return DatasetManifest(root, classes, {c: files[c] for c in classes}, ignored)
