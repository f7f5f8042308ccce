from pathlib import Path

import matplotlib

matplotlib.use("Agg")

from matplotlib import rcParams  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

# Fixed salt so element ids, and with them the file bytes, repeat across runs.
rcParams["svg.hashsalt"] = "vaesynth"

PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def new_figure(width: int = 600, height: int = 600) -> Figure:
    """Create a figure, detached from any pyplot state, whose SVG viewBox is `width` x `height` points."""
    return Figure(figsize=(width / 72.0, height / 72.0), dpi=72)


def save_svg(fig: Figure, path: Path) -> None:
    """
    Write a figure as SVG without the creation date so identical figures give identical files.

    :param fig: The figure.
    :param path: Destination file.
    """
    fig.savefig(path, format="svg", metadata={"Date": None})
