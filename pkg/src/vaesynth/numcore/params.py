from typing import Dict, Iterator, List, Tuple

import numpy as np

from vaesynth.numcore.tensor import NumericMode, Tensor


class MissingGradientError(ValueError):
    """Raised by the optimizer when a parameter has no gradient."""


class ParamSet:
    """
    Ordered collection of named parameter tensors plus the optimizer state of each parameter.

    Parameters are iterated in insertion order. Every parameter has a first- and second-moment
    buffer of its own shape, created together with the parameter.

    Example Usage:
        ps = ParamSet()
        w = ps.add("dense.w", np.zeros((4, 2)))
        for name, p in ps.items():
            print(name, p.shape)
    """

    def __init__(self, mode: NumericMode = NumericMode.STANDARD):
        self.mode = mode
        self._params: Dict[str, Tensor] = {}
        self.first_moment: Dict[str, np.ndarray] = {}
        self.second_moment: Dict[str, np.ndarray] = {}
        self.step = 0

    def add(self, name: str, data) -> Tensor:
        """
        Add a parameter.

        :param name: Unique parameter name.
        :param data: Initial value.
        :return: The parameter tensor.
        :raises ValueError: If a parameter with this name already exists.
        """
        if name in self._params:
            raise ValueError(f"Duplicate parameter name: {name}")
        t = Tensor(data, dtype=self.mode.dtype, requires_grad=True)
        self._params[name] = t
        self.first_moment[name] = np.zeros_like(t.data)
        self.second_moment[name] = np.zeros_like(t.data)
        return t

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __iter__(self) -> Iterator[str]:
        return iter(self._params)

    def __len__(self) -> int:
        return len(self._params)

    def names(self) -> List[str]:
        return list(self._params)

    def items(self) -> List[Tuple[str, Tensor]]:
        return list(self._params.items())

    def values(self) -> List[Tensor]:
        return list(self._params.values())

    def zero_grad(self) -> None:
        for p in self._params.values():
            p.zero_grad()

    def clear_grad(self) -> None:
        for p in self._params.values():
            p.grad = None

    def sum_square(self) -> float:
        """Sum over all parameter elements of param², accumulated in 64-bit."""
        return float(sum(np.sum(np.square(p.data, dtype=np.float64)) for p in self._params.values()))

    def copy(self) -> 'ParamSet':
        ps = ParamSet(self.mode)
        for name, p in self._params.items():
            ps.add(name, p.data.copy())
            ps.first_moment[name] = self.first_moment[name].copy()
            ps.second_moment[name] = self.second_moment[name].copy()
        ps.step = self.step
        return ps
