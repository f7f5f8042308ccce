from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from vaesynth.vae.model import VaeModel, encode


@dataclass
class PointCloud:
    """
    Latent vectors with one class label per vector.

    Attributes:
        points (np.ndarray): (n, k) matrix, k >= 2.
        labels (List[str]): Class label of every point.
    """
    points: np.ndarray
    labels: List[str]

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        self.labels = list(self.labels)
        if self.points.ndim != 2 or self.points.shape[1] < 2:
            raise ValueError(f"A point cloud needs an (n, k >= 2) matrix, got shape {self.points.shape}")
        if len(self.labels) != self.points.shape[0]:
            raise ValueError(f"{len(self.labels)} labels for {self.points.shape[0]} points")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def relabel(self, labels: Sequence[str]) -> 'PointCloud':
        return PointCloud(self.points, list(labels))


@dataclass
class Projection2D:
    """
    2-D coordinates of a point cloud.

    Attributes:
        coords (np.ndarray): (n, 2) finite coordinates.
        labels (List[str]): Class labels of the source cloud.
        method (str): ``pca`` or ``tsne``.
        params (Dict[str, Any]): Parameters used and diagnostics of the projection.
    """
    coords: np.ndarray
    labels: List[str]
    method: str
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=np.float64)
        if self.coords.ndim != 2 or self.coords.shape[1] != 2:
            raise ValueError(f"Projection coordinates must be (n, 2), got {self.coords.shape}")
        if len(self.labels) != self.coords.shape[0]:
            raise ValueError(f"{len(self.labels)} labels for {self.coords.shape[0]} points")
        if not np.all(np.isfinite(self.coords)):
            raise ValueError(f"{self.method} projection produced non-finite coordinates")

    @property
    def n(self) -> int:
        return self.coords.shape[0]


def latent_cloud(model: VaeModel, images: np.ndarray, labels: Sequence[str], batch_size: int = 64) -> PointCloud:
    """
    Encode images and collect their latent means.

    :param model: The model.
    :param images: (N, 1, side, side) images.
    :param labels: Class label per image.
    :param batch_size: Images encoded per call.
    :return: Cloud of the (N, d) means.
    """
    mus = [encode(model, images[i:i + batch_size])[0].data for i in range(0, len(images), batch_size)]
    return PointCloud(np.concatenate(mus, axis=0), labels)
