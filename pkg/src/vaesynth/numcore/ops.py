"""
The fixed set of differentiable operators.

Every operator is a small class with a shape check, a forward pass and a backward pass over numpy
arrays. ``op_forward`` and ``op_backward`` are the public entry points working on tensors; the
``Tape`` in :mod:`vaesynth.numcore.tape` calls the array level functions directly.
"""
import logging
from typing import Any, Dict, List, Sequence

import numpy as np

from vaesynth.numcore.tensor import NonFiniteError, ShapeError, Tensor, as_tensor, check_shape

logger = logging.getLogger(__name__)

OPERATORS: Dict[str, 'Operator'] = {}


def register(kind: str):
    """Class decorator adding an operator instance to the registry under `kind`."""
    def wrap(cls):
        cls.kind = kind
        OPERATORS[kind] = cls()
        return cls
    return wrap


class Operator:
    """
    Base class of the registered operators.

    Subclasses implement `check`, `forward` and `backward`. `backward` receives the forward inputs,
    the forward output and the gradient with respect to that output and returns one gradient per input.
    """
    kind: str = ""
    arity: int | None = None

    def check(self, xs: Sequence[np.ndarray], attrs: Dict[str, Any]) -> None:
        pass

    def forward(self, xs: Sequence[np.ndarray], attrs: Dict[str, Any]) -> np.ndarray:
        raise NotImplementedError(f"Forward pass not implemented for {self.kind}")

    def backward(self, xs: Sequence[np.ndarray], attrs: Dict[str, Any], out: np.ndarray,
                 grad: np.ndarray) -> List[np.ndarray]:
        raise NotImplementedError(f"Backward pass not implemented for {self.kind}")


def _scalar(value, dtype) -> np.ndarray:
    return np.asarray(value, dtype=dtype)


@register("matmul")
class MatMul(Operator):
    arity = 2

    def check(self, xs, attrs):
        a, b = xs
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise ShapeError(f"matmul: incompatible shapes {a.shape} and {b.shape}")

    def forward(self, xs, attrs):
        a, b = xs
        return a @ b

    def backward(self, xs, attrs, out, grad):
        a, b = xs
        return [grad @ b.T, a.T @ grad]


def conv_output_side(side: int, kernel: int, stride: int, padding: int) -> int:
    return (side + 2 * padding - kernel) // stride + 1


def _im2col(x: np.ndarray, kh: int, kw: int, stride: int, padding: int, oh: int, ow: int) -> np.ndarray:
    n, c = x.shape[:2]
    xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    cols = np.empty((n, c, kh, kw, oh, ow), dtype=x.dtype)
    for i in range(kh):
        for j in range(kw):
            cols[:, :, i, j] = xp[:, :, i:i + stride * (oh - 1) + 1:stride, j:j + stride * (ow - 1) + 1:stride]
    return cols


@register("conv2d")
class Conv2d(Operator):
    """
    2-D cross-correlation of an (N, C, H, W) input with an (O, C, KH, KW) kernel.

    attrs: ``stride`` (1 or 2, default 1) and ``padding`` (zero padding on every side, default 0).
    """
    arity = 2

    def check(self, xs, attrs):
        x, w = xs
        if x.ndim != 4 or w.ndim != 4:
            raise ShapeError(f"conv2d: expected 4-D input and kernel, got {x.shape} and {w.shape}")
        if x.shape[1] != w.shape[1]:
            raise ShapeError(f"conv2d: input channels of {x.shape} do not match kernel {w.shape}")
        stride = attrs.get("stride", 1)
        padding = attrs.get("padding", 0)
        if stride not in (1, 2):
            raise ValueError(f"conv2d: stride must be 1 or 2, got {stride}")
        if padding < 0:
            raise ValueError(f"conv2d: padding must be non-negative, got {padding}")
        if x.shape[2] + 2 * padding < w.shape[2] or x.shape[3] + 2 * padding < w.shape[3]:
            raise ShapeError(f"conv2d: input {x.shape} is smaller than kernel {w.shape}")

    def forward(self, xs, attrs):
        x, w = xs
        stride = attrs.get("stride", 1)
        padding = attrs.get("padding", 0)
        kh, kw = w.shape[2:]
        oh = conv_output_side(x.shape[2], kh, stride, padding)
        ow = conv_output_side(x.shape[3], kw, stride, padding)
        cols = _im2col(x, kh, kw, stride, padding, oh, ow)
        out = np.tensordot(cols, w, axes=([1, 2, 3], [1, 2, 3]))
        return np.ascontiguousarray(out.transpose(0, 3, 1, 2))

    def backward(self, xs, attrs, out, grad):
        x, w = xs
        stride = attrs.get("stride", 1)
        padding = attrs.get("padding", 0)
        n, c, h, wd = x.shape
        kh, kw = w.shape[2:]
        oh, ow = grad.shape[2:]
        cols = _im2col(x, kh, kw, stride, padding, oh, ow)
        dw = np.tensordot(grad, cols, axes=([0, 2, 3], [0, 4, 5]))
        dcols = np.tensordot(grad, w, axes=([1], [0]))
        dxp = np.zeros((n, c, h + 2 * padding, wd + 2 * padding), dtype=x.dtype)
        for i in range(kh):
            for j in range(kw):
                dxp[:, :, i:i + stride * (oh - 1) + 1:stride, j:j + stride * (ow - 1) + 1:stride] += \
                    dcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
        dx = dxp[:, :, padding:padding + h, padding:padding + wd]
        return [np.ascontiguousarray(dx), dw]


@register("upsample2x_nearest")
class Upsample2xNearest(Operator):
    arity = 1

    def check(self, xs, attrs):
        if xs[0].ndim != 4:
            raise ShapeError(f"upsample2x_nearest: expected 4-D input, got {xs[0].shape}")

    def forward(self, xs, attrs):
        return xs[0].repeat(2, axis=2).repeat(2, axis=3)

    def backward(self, xs, attrs, out, grad):
        n, c, h, w = xs[0].shape
        return [grad.reshape(n, c, h, 2, w, 2).sum(axis=(3, 5))]


@register("add_bias")
class AddBias(Operator):
    """Adds a per-channel bias along axis 1 of a 2-D (N, C) or 4-D (N, C, H, W) input."""
    arity = 2

    def check(self, xs, attrs):
        x, b = xs
        if x.ndim not in (2, 4) or b.ndim != 1 or b.shape[0] != x.shape[1]:
            raise ShapeError(f"add_bias: bias {b.shape} does not fit input {x.shape}")

    def forward(self, xs, attrs):
        x, b = xs
        shape = (1, -1) if x.ndim == 2 else (1, -1, 1, 1)
        return x + b.reshape(shape)

    def backward(self, xs, attrs, out, grad):
        axes = (0,) if grad.ndim == 2 else (0, 2, 3)
        return [grad, grad.sum(axis=axes)]


@register("relu")
class Relu(Operator):
    arity = 1

    def forward(self, xs, attrs):
        return np.maximum(xs[0], 0)

    def backward(self, xs, attrs, out, grad):
        return [grad * (xs[0] > 0)]


@register("sigmoid")
class Sigmoid(Operator):
    arity = 1

    def forward(self, xs, attrs):
        x = xs[0]
        e = np.exp(-np.abs(x))
        return np.where(x >= 0, 1 / (1 + e), e / (1 + e)).astype(x.dtype)

    def backward(self, xs, attrs, out, grad):
        return [grad * out * (1 - out)]


@register("reshape")
class Reshape(Operator):
    arity = 1

    def check(self, xs, attrs):
        shape = tuple(attrs["shape"])
        if int(np.prod(shape)) != xs[0].size:
            raise ShapeError(f"reshape: cannot reshape {xs[0].shape} into {shape}")

    def forward(self, xs, attrs):
        return xs[0].reshape(tuple(attrs["shape"]))

    def backward(self, xs, attrs, out, grad):
        return [grad.reshape(xs[0].shape)]


@register("mean_square_diff")
class MeanSquareDiff(Operator):
    arity = 2

    def check(self, xs, attrs):
        check_shape("mean_square_diff", xs[1].shape, xs[0].shape)

    def forward(self, xs, attrs):
        a, b = xs
        return _scalar(np.mean(np.square(a - b)), a.dtype)

    def backward(self, xs, attrs, out, grad):
        a, b = xs
        d = (2 / a.size) * (a - b) * grad
        return [d, -d]


@register("sum_square")
class SumSquare(Operator):
    arity = 1

    def forward(self, xs, attrs):
        return _scalar(np.sum(np.square(xs[0])), xs[0].dtype)

    def backward(self, xs, attrs, out, grad):
        return [2 * xs[0] * grad]


@register("slice")
class Slice(Operator):
    """Columns ``start:stop`` of a 2-D input."""
    arity = 1

    def check(self, xs, attrs):
        x = xs[0]
        start, stop = attrs["start"], attrs["stop"]
        if x.ndim != 2 or not 0 <= start < stop <= x.shape[1]:
            raise ShapeError(f"slice: columns {start}:{stop} out of range for {x.shape}")

    def forward(self, xs, attrs):
        return np.ascontiguousarray(xs[0][:, attrs["start"]:attrs["stop"]])

    def backward(self, xs, attrs, out, grad):
        dx = np.zeros_like(xs[0])
        dx[:, attrs["start"]:attrs["stop"]] = grad
        return [dx]


@register("clamp")
class Clamp(Operator):
    arity = 1

    def forward(self, xs, attrs):
        return np.clip(xs[0], attrs["lo"], attrs["hi"])

    def backward(self, xs, attrs, out, grad):
        x = xs[0]
        return [grad * ((x >= attrs["lo"]) & (x <= attrs["hi"]))]


@register("reparameterize")
class Reparameterize(Operator):
    """z = mu + exp(0.5 * logvar) * eps with the noise ``eps`` passed in attrs."""
    arity = 2

    def check(self, xs, attrs):
        mu, logvar = xs
        eps = np.asarray(attrs["eps"])
        if mu.shape != logvar.shape or eps.shape != mu.shape:
            raise ShapeError(f"reparameterize: mu {mu.shape}, logvar {logvar.shape} and eps {eps.shape} differ")

    def forward(self, xs, attrs):
        mu, logvar = xs
        return mu + np.exp(0.5 * logvar) * np.asarray(attrs["eps"], dtype=mu.dtype)

    def backward(self, xs, attrs, out, grad):
        mu, logvar = xs
        eps = np.asarray(attrs["eps"], dtype=mu.dtype)
        return [grad, grad * eps * 0.5 * np.exp(0.5 * logvar)]


def _batch_size(x: np.ndarray) -> int:
    return 1 if x.ndim == 1 else x.shape[0]


@register("kld_gaussian")
class KldGaussian(Operator):
    """Closed form KL(N(mu, exp(logvar)) || N(0, I)), summed over latent dims and averaged over the batch."""
    arity = 2

    def check(self, xs, attrs):
        if xs[0].shape != xs[1].shape:
            raise ShapeError(f"kld_gaussian: mu {xs[0].shape} and logvar {xs[1].shape} differ")

    def forward(self, xs, attrs):
        mu, logvar = xs
        kld = -0.5 * np.sum(1 + logvar - np.square(mu) - np.exp(logvar))
        return _scalar(kld / _batch_size(mu), mu.dtype)

    def backward(self, xs, attrs, out, grad):
        mu, logvar = xs
        b = _batch_size(mu)
        return [grad * mu / b, grad * -0.5 * (1 - np.exp(logvar)) / b]


@register("softmax_cross_entropy")
class SoftmaxCrossEntropy(Operator):
    """Mean cross-entropy of (N, K) logits against the integer class labels in attrs."""
    arity = 1

    def check(self, xs, attrs):
        logits = xs[0]
        labels = np.asarray(attrs["labels"])
        if logits.ndim != 2 or labels.shape != (logits.shape[0],):
            raise ShapeError(f"softmax_cross_entropy: logits {logits.shape} and labels {labels.shape} differ")

    @staticmethod
    def _log_softmax(logits: np.ndarray) -> np.ndarray:
        shifted = logits - logits.max(axis=1, keepdims=True)
        return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))

    def forward(self, xs, attrs):
        logits = xs[0]
        labels = np.asarray(attrs["labels"], dtype=np.int64)
        logp = self._log_softmax(logits)
        return _scalar(-np.mean(logp[np.arange(logits.shape[0]), labels]), logits.dtype)

    def backward(self, xs, attrs, out, grad):
        logits = xs[0]
        labels = np.asarray(attrs["labels"], dtype=np.int64)
        d = np.exp(self._log_softmax(logits))
        d[np.arange(logits.shape[0]), labels] -= 1
        return [d * grad / logits.shape[0]]


@register("scale")
class Scale(Operator):
    arity = 1

    def forward(self, xs, attrs):
        return (xs[0] * attrs["factor"]).astype(xs[0].dtype)

    def backward(self, xs, attrs, out, grad):
        return [grad * attrs["factor"]]


@register("add")
class Add(Operator):
    """Elementwise sum of any number of equally shaped inputs."""

    def check(self, xs, attrs):
        if not xs:
            raise ValueError("add: at least one input is required")
        for x in xs[1:]:
            check_shape("add", x.shape, xs[0].shape)

    def forward(self, xs, attrs):
        out = xs[0].copy()
        for x in xs[1:]:
            out = out + x
        return out

    def backward(self, xs, attrs, out, grad):
        return [grad for _ in xs]


def get_operator(kind: str) -> Operator:
    """
    Look up a registered operator.

    :param kind: Operator identifier, e.g. ``"conv2d"``.
    :raises ValueError: If no operator is registered under this name.
    """
    try:
        return OPERATORS[kind]
    except KeyError:
        raise ValueError(f"Unknown operator kind: {kind}")


def forward_arrays(kind: str, xs: Sequence[np.ndarray], attrs: Dict[str, Any]) -> np.ndarray:
    op = get_operator(kind)
    if op.arity is not None and len(xs) != op.arity:
        raise ValueError(f"{kind}: expected {op.arity} inputs, got {len(xs)}")
    op.check(xs, attrs)
    out = op.forward(xs, attrs)
    if not np.all(np.isfinite(out)):
        raise NonFiniteError(f"{kind}: forward pass produced non-finite values")
    return out


def backward_arrays(kind: str, xs: Sequence[np.ndarray], attrs: Dict[str, Any], out: np.ndarray,
                    grad: np.ndarray) -> List[np.ndarray]:
    op = get_operator(kind)
    if grad.shape != out.shape:
        raise ShapeError(f"{kind}: upstream gradient {grad.shape} does not match output {out.shape}")
    return op.backward(xs, attrs, out, grad)


def op_forward(kind: str, inputs: Sequence[Tensor], attrs: Dict[str, Any] | None = None) -> Tensor:
    """
    Apply an operator to tensors.

    :param kind: Operator identifier.
    :param inputs: Input tensors (numpy arrays are accepted as well).
    :param attrs: Operator attributes, e.g. ``{"stride": 2, "padding": 1}`` for conv2d.
    :return: The output tensor.
    :raises ShapeError: If the input shapes are invalid for the operator.
    :raises ValueError: If the operator kind is unknown.
    """
    xs = [as_tensor(t).data for t in inputs]
    out = forward_arrays(kind, xs, attrs or {})
    return Tensor(out, dtype=out.dtype)


def op_backward(kind: str, inputs: Sequence[Tensor], attrs: Dict[str, Any] | None,
                upstream_grad: Tensor) -> List[Tensor]:
    """
    Gradients of a scalar loss with respect to each operator input, given the gradient of the output.

    :param kind: Operator identifier.
    :param inputs: The forward inputs.
    :param attrs: The forward attributes.
    :param upstream_grad: Gradient with respect to the forward output.
    :return: One gradient tensor per input.
    :raises ShapeError: If `upstream_grad` does not have the shape of the forward output.
    """
    attrs = attrs or {}
    xs = [as_tensor(t).data for t in inputs]
    out = forward_arrays(kind, xs, attrs)
    grad = np.asarray(as_tensor(upstream_grad).data, dtype=out.dtype)
    return [Tensor(g, dtype=out.dtype) for g in backward_arrays(kind, xs, attrs, out, grad)]
