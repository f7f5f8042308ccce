import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from vaesynth.numcore.params import ParamSet
from vaesynth.numcore.tape import Tape
from vaesynth.numcore.tensor import ShapeError, Tensor

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-5
# Denominator floor of the relative error; below it the error is effectively absolute.
_ERROR_FLOOR = 1e-6


@dataclass
class GradCheckReport:
    max_rel_error: float
    worst_parameter: str | None
    checked: int

    def passed(self, tol: float) -> bool:
        return self.max_rel_error < tol


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), _ERROR_FLOOR)


def grad_check(graph: Callable[[Tape], Tensor], params: ParamSet, tol: float = 1e-4,
               h: float = DEFAULT_STEP) -> GradCheckReport:
    """
    Compare the tape gradient of a scalar graph with central finite differences.

    Every element of every parameter is perturbed by ±h and (L+ - L-) / 2h is compared with the
    analytic gradient. The graph must be deterministic: any random draw it needs has to be fixed
    outside of it.

    :param graph: Function building the scalar output on the tape it receives.
    :param params: Parameters to check, in verification (64-bit) mode.
    :param tol: Relative error tolerance, only used for logging the outcome.
    :param h: Finite difference step.
    :return: Report with the largest relative error and the parameter it occurred in.
    :raises ValueError: If the parameters are not 64-bit.
    :raises ShapeError: If the graph output is not a scalar.
    """
    for name, p in params.items():
        if p.dtype != np.float64:
            raise ValueError(f"Gradient checks need 64-bit parameters, {name} is {p.dtype}")
    if len(params) == 0:
        return GradCheckReport(0.0, None, 0)

    params.clear_grad()
    tape = Tape()
    out = graph(tape)
    if out.size != 1:
        raise ShapeError(f"grad_check needs a scalar graph output, got shape {out.shape}")
    tape.backward(out)
    analytic = {name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data)) for name, p in params.items()}
    params.clear_grad()

    def evaluate() -> float:
        return graph(Tape(enabled=False)).item()

    worst, worst_name, checked = 0.0, None, 0
    for name, p in params.items():
        flat = p.data.reshape(-1)
        expected = analytic[name].reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + h
            loss_plus = evaluate()
            flat[i] = original - h
            loss_minus = evaluate()
            flat[i] = original
            err = relative_error(float(expected[i]), (loss_plus - loss_minus) / (2 * h))
            checked += 1
            if err > worst:
                worst, worst_name = err, name
    report = GradCheckReport(worst, worst_name, checked)
    logger.info("gradient check over %d elements: max relative error %.3e (%s), tolerance %.1e",
                checked, worst, worst_name, tol)
    return report
