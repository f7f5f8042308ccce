from dataclasses import dataclass
from typing import Any, Dict, List

import numpy as np

from vaesynth.numcore.ops import backward_arrays, forward_arrays
from vaesynth.numcore.tensor import ShapeError, Tensor, as_tensor


@dataclass
class _Record:
    kind: str
    inputs: List[Tensor]
    attrs: Dict[str, Any]
    output: Tensor


class Tape:
    """
    Linear record of the operators applied during one forward pass.

    Operators are appended in execution order, so walking the record backwards visits every output
    before the operators that produced its inputs. A disabled tape records nothing and is used for
    evaluation.

    Example Usage:
        tape = Tape()
        y = tape.apply("matmul", x, w)
        loss = tape.apply("sum_square", y)
        tape.backward(loss)
        print(w.grad)
    """

    def __init__(self, enabled: bool = True):
        self.enabled = enabled
        self._records: List[_Record] = []

    def __len__(self):
        return len(self._records)

    def apply(self, kind: str, *inputs, **attrs) -> Tensor:
        """
        Run an operator forward and record it when any input requires a gradient.

        :param kind: Operator identifier.
        :param inputs: Input tensors or arrays.
        :param attrs: Operator attributes.
        :return: The output tensor.
        """
        tensors = [as_tensor(t) for t in inputs]
        out = forward_arrays(kind, [t.data for t in tensors], attrs)
        output = Tensor(out, dtype=out.dtype)
        if self.enabled and any(t.requires_grad for t in tensors):
            output.requires_grad = True
            self._records.append(_Record(kind, tensors, attrs, output))
        return output

    def backward(self, output: Tensor) -> None:
        """
        Propagate d(output)/d(.) to every recorded tensor that requires a gradient.

        Gradients are added to existing gradient buffers. The record is cleared afterwards.

        :param output: Scalar tensor produced on this tape.
        :raises ShapeError: If the output is not a scalar.
        """
        if output.size != 1:
            raise ShapeError(f"backward needs a scalar output, got shape {output.shape}")
        output.accumulate_grad(np.ones_like(output.data))
        for record in reversed(self._records):
            if record.output.grad is None:
                continue
            grads = backward_arrays(record.kind, [t.data for t in record.inputs], record.attrs,
                                    record.output.data, record.output.grad)
            for tensor, grad in zip(record.inputs, grads):
                if tensor.requires_grad:
                    tensor.accumulate_grad(grad)
        self._records.clear()
