import logging
from typing import List, Tuple

import numpy as np

from vaesynth.latentmap.cloud import PointCloud, Projection2D

logger = logging.getLogger(__name__)

TOLERANCE = 1e-9
MAX_ITERATIONS = 10000


def _orthogonalize(v: np.ndarray, basis: List[np.ndarray]) -> np.ndarray:
    for b in basis:
        v = v - (b @ v) * b
    return v


def _fallback_direction(k: int, basis: List[np.ndarray]) -> np.ndarray:
    """Unit vector orthogonal to `basis`, built from the standard basis vector least aligned with it."""
    candidates = [_orthogonalize(np.eye(k)[i], basis) for i in range(k)]
    best = max(candidates, key=lambda c: float(np.linalg.norm(c)))
    best = _orthogonalize(best, basis)
    return best / np.linalg.norm(best)


def power_iteration(cov: np.ndarray, basis: List[np.ndarray], tol: float = TOLERANCE,
                    max_iterations: int = MAX_ITERATIONS, floor: float = 0.0) -> Tuple[np.ndarray, float, int]:
    """
    Leading eigenvector of a symmetric matrix within the orthogonal complement of `basis`.

    :param cov: (k, k) symmetric positive semi-definite matrix, already deflated by `basis`.
    :param basis: Orthonormal vectors found so far.
    :param tol: Stop once successive unit vectors differ by less than this.
    :param max_iterations: Iteration budget.
    :param floor: Eigenvalues below this count as zero.
    :return: (unit eigenvector, eigenvalue, iterations used)
    """
    k = cov.shape[0]
    row = int(np.argmax(np.linalg.norm(cov, axis=1)))
    v = _orthogonalize(cov[row].copy(), basis)
    norm = np.linalg.norm(v)
    if norm <= max(floor, np.finfo(np.float64).tiny):
        v = _fallback_direction(k, basis)
    else:
        v = v / norm
    for it in range(1, max_iterations + 1):
        w = _orthogonalize(cov @ v, basis)
        norm = np.linalg.norm(w)
        if norm <= floor:
            # the remaining spectrum is zero, any orthogonal direction is an eigenvector
            return v, 0.0, it
        w = w / norm
        if w @ v < 0:
            w = -w
        if np.linalg.norm(w - v) < tol:
            return w, float(w @ cov @ w), it
        v = w
    logger.warning("power iteration did not converge within %d iterations", max_iterations)
    return v, float(v @ cov @ v), max_iterations


def pca_2d(cloud: PointCloud) -> Projection2D:
    """
    Project mean-centered points onto the two leading eigenvectors of their covariance matrix.

    Eigenvectors come from power iteration with deflation; each component is signed so that its
    largest-magnitude loading is positive. Zero-variance data gives all-zero coordinates and is
    flagged with ``zero_variance`` in the params.

    :param cloud: At least 3 points.
    :return: The projection.
    :raises ValueError: If there are fewer than 3 points.
    """
    if cloud.n < 3:
        raise ValueError(f"PCA needs at least 3 points, got {cloud.n}")
    x = cloud.points - cloud.points.mean(axis=0)
    cov = x.T @ x / (cloud.n - 1)
    total = float(np.trace(cov))
    if total <= 0.0:
        return Projection2D(np.zeros((cloud.n, 2)), cloud.labels, "pca",
                            {"zero_variance": True, "explained_variance": [0.0, 0.0]})
    components: List[np.ndarray] = []
    variances: List[float] = []
    iterations: List[int] = []
    deflated = cov.copy()
    for _ in range(2):
        v, lam, its = power_iteration(deflated, components, floor=total * 1e-12)
        v = v if v[np.argmax(np.abs(v))] > 0 else -v
        components.append(v)
        variances.append(lam)
        iterations.append(its)
        deflated = deflated - lam * np.outer(v, v)
    basis = np.stack(components, axis=1)
    params = {
        "zero_variance": False,
        "explained_variance": variances,
        "explained_variance_ratio": [v / total for v in variances],
        "components": basis.T.tolist(),
        "iterations": iterations,
    }
    return Projection2D(x @ basis, cloud.labels, "pca", params)
