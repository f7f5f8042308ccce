from typing import Tuple

import numpy as np

from vaesynth.numcore.params import MissingGradientError, ParamSet

DEFAULT_LEARNING_RATE = 1e-3
DEFAULT_BETAS = (0.9, 0.999)
DEFAULT_EPS = 1e-8


def adam_step(params: ParamSet, lr: float = DEFAULT_LEARNING_RATE, betas: Tuple[float, float] = DEFAULT_BETAS,
              eps: float = DEFAULT_EPS, t: int | None = None) -> ParamSet:
    """
    Apply one bias-corrected Adam update to every parameter and zero the gradients.

        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g²
        p = p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)

    :param params: Parameters with populated gradients; their moment buffers are updated in place.
    :param lr: Learning rate.
    :param betas: Exponential decay rates of the first and second moment.
    :param eps: Stabilizer added to the denominator.
    :param t: Step index (1-based). Defaults to the step counter kept by the parameter set plus one.
    :return: The updated parameter set (same object).
    :raises MissingGradientError: If a parameter has no gradient.
    :raises ValueError: If `t` is smaller than 1.
    """
    if t is None:
        t = params.step + 1
    if t < 1:
        raise ValueError(f"Adam step index must be >= 1, got {t}")
    for name, p in params.items():
        if p.grad is None:
            raise MissingGradientError(f"Parameter has no gradient: {name}")
    b1, b2 = betas
    for name, p in params.items():
        g = p.grad
        m = params.first_moment[name]
        v = params.second_moment[name]
        m *= b1
        m += (1 - b1) * g
        v *= b2
        v += (1 - b2) * np.square(g)
        m_hat = m / (1 - b1 ** t)
        v_hat = v / (1 - b2 ** t)
        p.data -= (lr * m_hat / (np.sqrt(v_hat) + eps)).astype(p.data.dtype)
    params.step = t
    params.zero_grad()
    return params
