import os
from pathlib import Path
from typing import List


def ls(p: Path, suffix: str | None = None, recursive: bool = True) -> List[Path]:
    """
    List the files in the given directory, optionally including its subdirectories.

    :param p: The path to the directory.
    :type p: Path object
    :param suffix: If given, only files with this suffix (e.g. ``".pgm"``) are returned.
    :param recursive: If true, files in subdirectories are listed as well.
    :return: The paths of the files found, sorted lexicographically.
    :rtype: List[Path]
    :raises IOError: If the input directory does not exist.
    """
    p = Path(p)
    if not p.is_dir():
        raise IOError(f"Input directory does not exist: {p}")
    lf = []
    for root, dirs, files in os.walk(p):
        for file in files:
            if suffix is None or file.endswith(suffix):
                lf.append(Path(root) / file)
        if not recursive:
            break
    return sorted(lf)


def ensure_writable_dir(p: Path) -> Path:
    """
    Create a directory (and its parents) if needed and check that it can be written to.

    :param p: The directory path.
    :return: The directory as a Path.
    :raises IOError: If the directory cannot be created or is not writable.
    """
    p = Path(p)
    p.mkdir(parents=True, exist_ok=True)
    if not os.access(p, os.W_OK):
        raise IOError(f"Output directory is not writable: {p}")
    return p
