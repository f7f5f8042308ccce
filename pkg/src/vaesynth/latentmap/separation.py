from typing import Sequence

import numpy as np
from scipy.spatial.distance import pdist

from vaesynth.latentmap.cloud import PointCloud, Projection2D


def cluster_separation(points, labels: Sequence[str] | None = None) -> float:
    """
    Mean intra-class pairwise distance divided by mean inter-class pairwise distance.

    Lower values mean better separated classes.

    :param points: (n, k) matrix, PointCloud or Projection2D.
    :param labels: Class label per point; taken from the cloud or projection when omitted.
    :return: The ratio.
    :raises ValueError: If there are fewer than 2 classes, a class has fewer than 2 points,
                        or all points coincide.
    """
    if isinstance(points, PointCloud):
        labels, x = (points.labels if labels is None else labels), points.points
    elif isinstance(points, Projection2D):
        labels, x = (points.labels if labels is None else labels), points.coords
    else:
        x = np.asarray(points, dtype=np.float64)
    if labels is None:
        raise ValueError("cluster_separation needs class labels")
    labels = np.asarray(labels)
    if labels.shape[0] != x.shape[0]:
        raise ValueError(f"{labels.shape[0]} labels for {x.shape[0]} points")
    classes, counts = np.unique(labels, return_counts=True)
    if classes.size < 2:
        raise ValueError("cluster_separation needs at least 2 classes")
    small = classes[counts < 2]
    if small.size:
        raise ValueError(f"Class {small[0]} has fewer than 2 points")
    d = pdist(x)
    i, j = np.triu_indices(x.shape[0], k=1)
    same = labels[i] == labels[j]
    inter = d[~same].mean()
    if inter == 0:
        raise ValueError("All points coincide, the separation ratio is undefined")
    return float(d[same].mean() / inter)
