"""Named parameter storage shared by all networks of a model"""

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from ballbot_nav.config import ShapeError, UsageError


@dataclass
class Parameter:
    """A named array with its gradient buffer.

    Non-trainable entries (BatchNorm running statistics, a frozen encoder)
    never receive gradients and are skipped by optimisers.
    """

    name: str
    value: np.ndarray
    trainable: bool = True
    grad: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.grad = np.zeros_like(self.value)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def accumulate(self, grad: np.ndarray) -> None:
        if self.trainable:
            self.grad += grad


class ParameterStore:
    """Ordered collection of named parameters plus checkpoint metadata.

    Names are unique and shapes never change after `add`. Values are updated
    in place, so layers holding a `Parameter` always see the current weights.

    Usage:

    ```python
    store = ParameterStore()
    w = store.add("policy.fc0.weight", np.zeros((128, 56)))
    store.freeze("encoder.")
    store.state_dict()
    ```
    """

    def __init__(self, dtype=np.float32, metadata: dict | None = None):
        self.dtype = np.dtype(dtype)
        self.metadata: dict = {"creation_step": 0, "config_hash": "none"}
        self.metadata.update(metadata or {})
        self._params: dict[str, Parameter] = {}

    def add(self, name: str, value: np.ndarray, trainable: bool = True) -> Parameter:
        if name in self._params:
            raise UsageError(f"Parameter {name} already exists")
        param = Parameter(name, np.array(value, dtype=self.dtype), trainable)
        self._params[name] = param
        return param

    def __getitem__(self, name: str) -> Parameter:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __iter__(self) -> Iterator[Parameter]:
        return iter(self._params.values())

    def __len__(self) -> int:
        return len(self._params)

    def names(self) -> list[str]:
        return list(self._params)

    def trainable(self) -> list[Parameter]:
        return [p for p in self if p.trainable]

    def num_values(self, trainable_only: bool = False) -> int:
        params = self.trainable() if trainable_only else list(self)
        return int(sum(p.value.size for p in params))

    def zero_grad(self) -> None:
        for p in self:
            p.grad[...] = 0

    def freeze(self, prefix: str) -> None:
        """Mark every parameter whose name starts with `prefix` as non-trainable"""

        for p in self:
            if p.name.startswith(prefix):
                p.trainable = False
                p.grad[...] = 0

    def gradients(self) -> dict[str, np.ndarray]:
        return {p.name: p.grad for p in self.trainable()}

    def astype(self, dtype) -> "ParameterStore":
        """Cast every value and gradient buffer in place"""

        self.dtype = np.dtype(dtype)
        for p in self:
            p.value = p.value.astype(self.dtype)
            p.grad = p.grad.astype(self.dtype)
        return self

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: p.value.copy() for name, p in self._params.items()}

    def load_state_dict(self, tensors: dict[str, np.ndarray]) -> None:
        """Copy values into the existing parameters.

        Args:
            tensors: name to array, must hold exactly this store's names

        Raises:
            ShapeError: a tensor is missing, unexpected or has another shape.
                The message names the offending tensor.
        """

        for name, p in self._params.items():
            if name not in tensors:
                continue
            value = np.asarray(tensors[name])
            if value.shape != p.shape:
                raise ShapeError(
                    f"Tensor {name} has shape {value.shape} in the checkpoint "
                    f"but {p.shape} in this model"
                )
        missing = [name for name in self._params if name not in tensors]
        if missing:
            raise ShapeError(f"Tensor {missing[0]} is missing from the checkpoint")
        extra = [name for name in tensors if name not in self._params]
        if extra:
            raise ShapeError(f"Tensor {extra[0]} is not part of this model")
        for name, p in self._params.items():
            p.value[...] = tensors[name]
