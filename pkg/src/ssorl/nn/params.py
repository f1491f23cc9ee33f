"""Named parameter collections with adaptive-moment optimizer state."""

from __future__ import annotations

import numpy as np

from ssorl.errors import ContractViolation
from ssorl.nn.tensor import Tensor


class ParamSet:
    """Named trainable tensors plus per-parameter first/second moments.

    The step counter increments by exactly one per optimizer step; moment
    buffers are lazily created with the shapes of their parameters.
    """

    def __init__(self):
        self.params: dict[str, Tensor] = {}
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.step_count: int = 0

    def add(self, name: str, array: np.ndarray) -> Tensor:
        if name in self.params:
            raise ContractViolation(f"parameter {name!r} already exists")
        t = Tensor(np.asarray(array, dtype=np.float64), requires_grad=True)
        self.params[name] = t
        return t

    def __getitem__(self, name: str) -> Tensor:
        return self.params[name]

    def __contains__(self, name: str) -> bool:
        return name in self.params

    def names(self) -> list[str]:
        return list(self.params.keys())

    def n_values(self) -> int:
        return sum(t.data.size for t in self.params.values())

    def zero_grads(self):
        for t in self.params.values():
            t.grad = None

    def copy(self) -> "ParamSet":
        """Deep copy of parameters and optimizer state."""
        out = ParamSet()
        for name, t in self.params.items():
            out.add(name, t.data.copy())
        out.m = {k: a.copy() for k, a in self.m.items()}
        out.v = {k: a.copy() for k, a in self.v.items()}
        out.step_count = self.step_count
        return out

    def load_values(self, values: dict[str, np.ndarray]):
        """Overwrite parameter values in place (shapes must match)."""
        for name, arr in values.items():
            if name not in self.params:
                raise ContractViolation(f"unknown parameter {name!r}")
            if self.params[name].data.shape != arr.shape:
                raise ContractViolation(
                    f"shape mismatch for {name!r}: "
                    f"{self.params[name].data.shape} vs {arr.shape}"
                )
            self.params[name].data = np.asarray(arr, dtype=np.float64).copy()

    def values(self) -> dict[str, np.ndarray]:
        return {name: t.data.copy() for name, t in self.params.items()}
