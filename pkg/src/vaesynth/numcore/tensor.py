from enum import Enum
from typing import Sequence

import numpy as np


class ShapeError(ValueError):
    """Raised when the shapes handed to an operator are incompatible."""


class NonFiniteError(ArithmeticError):
    """Raised when an operator produced a NaN or an infinite value."""


class NumericMode(Enum):
    """
    Floating point precision used by a model.

    STANDARD is used for training and generation, VERIFICATION for finite-difference gradient checks.
    """
    STANDARD = "32"
    VERIFICATION = "64"

    @property
    def dtype(self) -> type:
        return np.float32 if self is NumericMode.STANDARD else np.float64

    @property
    def code(self) -> int:
        """Single byte identifying the mode inside a model file."""
        return 32 if self is NumericMode.STANDARD else 64

    @classmethod
    def from_code(cls, code: int) -> 'NumericMode':
        for mode in cls:
            if mode.code == code:
                return mode
        raise ValueError(f"Unknown numeric mode code: {code}")


class Tensor:
    """
    An n-dimensional float array with an optional gradient buffer of the same shape.

    The data is kept as a C-contiguous numpy array so that its row-major flat view matches
    the buffer layout used by the model file format.

    Example Usage:
        t = Tensor([[1.0, 2.0], [3.0, 4.0]], requires_grad=True)
        t.accumulate_grad(np.ones((2, 2)))
        print(t.shape, t.grad)
    """
    data: np.ndarray
    grad: np.ndarray | None
    requires_grad: bool

    def __init__(self, data, dtype=None, requires_grad: bool = False):
        if isinstance(data, Tensor):
            data = data.data
        if dtype is None:
            dtype = data.dtype if isinstance(data, np.ndarray) and data.dtype.kind == 'f' else np.float32
        self.data = np.require(np.asarray(data, dtype=dtype), requirements="C")
        self.grad = None
        self.requires_grad = requires_grad

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        """
        Return the value of a single-element tensor as a Python float.

        :raises ShapeError: If the tensor holds more than one element.
        """
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def accumulate_grad(self, grad: np.ndarray) -> None:
        """
        Add a gradient contribution to the gradient buffer, creating it on first use.

        :param grad: Gradient with the same shape as the tensor data.
        :raises ShapeError: If the gradient shape does not match the data shape.
        """
        grad = np.asarray(grad, dtype=self.data.dtype)
        if grad.shape != self.data.shape:
            raise ShapeError(f"gradient shape {grad.shape} does not match tensor shape {self.data.shape}")
        if self.grad is None:
            self.grad = grad.copy()
        else:
            self.grad += grad

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def copy(self) -> 'Tensor':
        t = Tensor(self.data.copy(), requires_grad=self.requires_grad)
        if self.grad is not None:
            t.grad = self.grad.copy()
        return t

    def __repr__(self):
        return f"Tensor(shape={self.shape}, dtype={self.dtype})"


def as_tensor(value, dtype=None) -> Tensor:
    """Wrap a numpy array (or anything array-like) into a Tensor; tensors are returned unchanged."""
    if isinstance(value, Tensor) and (dtype is None or value.dtype == dtype):
        return value
    return Tensor(value, dtype=dtype)


def check_shape(name: str, actual: Sequence[int], expected: Sequence[int]) -> None:
    """
    Compare two shapes and raise a ShapeError naming both when they differ.

    :param name: Operation name used in the error message.
    :param actual: Shape that was received.
    :param expected: Shape that was required.
    """
    if tuple(actual) != tuple(expected):
        raise ShapeError(f"{name}: expected shape {tuple(expected)}, got {tuple(actual)}")
