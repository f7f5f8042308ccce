"""
Exact t-SNE.

Affinities use a per-point Gaussian bandwidth found by bisection so that the entropy of every
conditional distribution equals log(perplexity). The embedding minimizes KL(P || Q) with a
Student-t Q by gradient descent with momentum, per-coordinate gains and early exaggeration.
"""
import logging
from typing import Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from vaesynth.latentmap.cloud import PointCloud, Projection2D
from vaesynth.numcore.rng import Rng

logger = logging.getLogger(__name__)

DEFAULT_PERPLEXITY = 10.0
DEFAULT_ITERATIONS = 500
LEARNING_RATE = 100.0
EXAGGERATION = 4.0
EXAGGERATION_ITERATIONS = 100
MOMENTUM_SWITCH = 250
INITIAL_MOMENTUM = 0.5
FINAL_MOMENTUM = 0.8
INIT_SCALE = 1e-4
MIN_GAIN = 0.01
ENTROPY_TOLERANCE = 1e-5
MAX_BISECTIONS = 50
# ln(beta) search interval of the bandwidth bisection
_LOG_BETA_RANGE = (-50.0, 50.0)
_Q_FLOOR = 1e-12


def squared_distances(x: np.ndarray) -> np.ndarray:
    return squareform(pdist(x, "sqeuclidean"))


def _row_entropy(d: np.ndarray, beta: float) -> Tuple[float, np.ndarray]:
    """Entropy (natural log) and probabilities of exp(-beta·d) normalized over the row."""
    shifted = d - d.min()
    p = np.exp(-beta * shifted)
    s = p.sum()
    p /= s
    return float(np.log(s) + beta * np.sum(shifted * p)), p


def conditional_probabilities(d2: np.ndarray, perplexity: float, tol: float = ENTROPY_TOLERANCE,
                              max_bisections: int = MAX_BISECTIONS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Row-stochastic affinities p_{j|i} with the entropy of every row within `tol` of log(perplexity).

    :param d2: (n, n) squared distances.
    :param perplexity: Effective number of neighbors.
    :param tol: Entropy tolerance.
    :param max_bisections: Bisection budget per row.
    :return: (conditional probability matrix with zero diagonal, bandwidths beta of the normalized distances)
    :raises ValueError: If no bandwidth reaches the target entropy for some row, naming the row.
    """
    n = d2.shape[0]
    positive = d2[d2 > 0]
    if positive.size == 0:
        raise ValueError("Entropy search infeasible at row 0: all points coincide")
    d2 = d2 / np.median(positive)
    target = np.log(perplexity)
    cond = np.zeros((n, n))
    betas = np.zeros(n)
    for i in range(n):
        d = np.delete(d2[i], i)
        lo, hi = _LOG_BETA_RANGE
        for _ in range(max_bisections):
            mid = 0.5 * (lo + hi)
            h, p = _row_entropy(d, np.exp(mid))
            if abs(h - target) < tol:
                break
            if h > target:
                lo = mid
            else:
                hi = mid
        else:
            raise ValueError(f"Entropy search infeasible at row {i}: entropy {h:.6f} cannot reach "
                             f"log(perplexity) {target:.6f}")
        cond[i, np.arange(n) != i] = p
        betas[i] = np.exp(mid)
    return cond, betas


def joint_probabilities(cond: np.ndarray) -> np.ndarray:
    """Symmetrized P = (P_cond + P_cond^T) / 2n; symmetric, zero diagonal, sums to 1."""
    return (cond + cond.T) / (2.0 * cond.shape[0])


def _student_t(y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    num = 1.0 / (1.0 + squared_distances(y))
    np.fill_diagonal(num, 0.0)
    return num, np.maximum(num / num.sum(), _Q_FLOOR)


def kl_divergence(p: np.ndarray, y: np.ndarray) -> float:
    """KL(P || Q) of an embedding `y` against the joint affinities `p`."""
    _, q = _student_t(y)
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def tsne_2d(cloud: PointCloud, perplexity: float = DEFAULT_PERPLEXITY, iterations: int = DEFAULT_ITERATIONS,
            seed: int = 0) -> Projection2D:
    """
    Embed a point cloud in 2-D with exact t-SNE.

    The initial embedding is drawn from N(0, 1e-4²) on the ``tsne`` stream of `seed`; labels are never read.

    :param cloud: At least 5 points.
    :param perplexity: Perplexity, 0 < perplexity < n.
    :param iterations: Gradient descent iterations.
    :param seed: Initialization seed.
    :return: The projection; params record the settings and the initial and final KL divergence.
    :raises ValueError: On too few points, an invalid perplexity or an infeasible entropy search.
    """
    n = cloud.n
    if n < 5:
        raise ValueError(f"t-SNE needs at least 5 points, got {n}")
    if not 0 < perplexity < n:
        raise ValueError(f"Perplexity must be in (0, {n}), got {perplexity}")
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    cond, _ = conditional_probabilities(squared_distances(cloud.points), perplexity)
    p = joint_probabilities(cond)
    y = Rng(seed).stream("tsne").standard_normal((n, 2)) * INIT_SCALE
    kl_initial = kl_divergence(p, y)
    update = np.zeros_like(y)
    gains = np.ones_like(y)
    for it in range(iterations):
        pe = p * EXAGGERATION if it < EXAGGERATION_ITERATIONS else p
        num, q = _student_t(y)
        pq = (pe - q) * num
        grad = 4.0 * (pq.sum(axis=1)[:, None] * y - pq @ y)
        same_sign = (grad > 0) == (update > 0)
        gains = np.maximum(np.where(same_sign, gains * 0.8, gains + 0.2), MIN_GAIN)
        momentum = INITIAL_MOMENTUM if it < MOMENTUM_SWITCH else FINAL_MOMENTUM
        update = momentum * update - LEARNING_RATE * gains * grad
        y = y + update
        y = y - y.mean(axis=0)
    kl_final = kl_divergence(p, y)
    logger.info("t-SNE of %d points: KL %.4f -> %.4f after %d iterations", n, kl_initial, kl_final, iterations)
    params = {"perplexity": perplexity, "iterations": iterations, "seed": seed, "learning_rate": LEARNING_RATE,
              "kl_initial": kl_initial, "kl_final": kl_final}
    return Projection2D(y, cloud.labels, "tsne", params)
