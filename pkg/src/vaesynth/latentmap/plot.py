from pathlib import Path
from typing import List

from vaesynth.dataio.csvio import write_csv
from vaesynth.dataio.svg import PALETTE, new_figure, save_svg
from vaesynth.latentmap.cloud import Projection2D

HEADER = ["x", "y", "class_label"]


def write_projection_csv(projection: Projection2D, path: Path) -> None:
    """Write one (x, y, class_label) row per point."""
    rows = [[float(x), float(y), label] for (x, y), label in zip(projection.coords, projection.labels)]
    write_csv(rows, HEADER, path)


def plot_projection_svg(projection: Projection2D, path: Path, classes: List[str] | None = None,
                        title: str | None = None) -> None:
    """
    Scatter plot of a projection on a 600 x 600 canvas, colored by class index.

    :param projection: The projection.
    :param path: Destination SVG file.
    :param classes: Class order for the palette; sorted labels when omitted.
    :param title: Figure title; defaults to the method name.
    """
    classes = classes or sorted(set(projection.labels))
    fig = new_figure(600, 600)
    ax = fig.add_subplot(1, 1, 1)
    for i, name in enumerate(classes):
        idx = [k for k, label in enumerate(projection.labels) if label == name]
        if not idx:
            continue
        pts = projection.coords[idx]
        ax.scatter(pts[:, 0], pts[:, 1], s=12, color=PALETTE[i % len(PALETTE)], label=name)
    ax.set_xlabel("dimension 1")
    ax.set_ylabel("dimension 2")
    ax.set_title(title or projection.method)
    ax.legend(loc="best", fontsize="small")
    save_svg(fig, path)
