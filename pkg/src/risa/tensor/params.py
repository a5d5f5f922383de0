from typing import Dict, Iterator, Mapping, Tuple

import attr
import numpy as np

from .core import Tape, Tensor


@attr.s(slots=True)  # pragma: no mutate
class ParameterSet:
    """All learnable tensors of a model together with buffers and Adam state.

    Buffers (batch-norm running statistics, feature scaling) are updated outside of differentiation.
    """

    params: Dict[str, np.ndarray] = attr.ib(factory=dict)  # pragma: no mutate
    buffers: Dict[str, np.ndarray] = attr.ib(factory=dict)  # pragma: no mutate
    adam_m: Dict[str, np.ndarray] = attr.ib(factory=dict)  # pragma: no mutate
    adam_v: Dict[str, np.ndarray] = attr.ib(factory=dict)  # pragma: no mutate
    step: int = attr.ib(default=0)  # pragma: no mutate

    def add(self, name: str, value: np.ndarray) -> None:
        if name in self.params:
            raise ValueError(f"Parameter `{name}` is already defined")
        self.params[name] = np.array(value, dtype=np.float64)
        self.adam_m[name] = np.zeros_like(self.params[name])
        self.adam_v[name] = np.zeros_like(self.params[name])

    def add_buffer(self, name: str, value: np.ndarray) -> None:
        self.buffers[name] = np.array(value, dtype=np.float64)

    def bind(self, tape: Tape) -> "BoundParameters":
        return BoundParameters(tape=tape, params=self)

    def count(self) -> int:
        return int(sum(value.size for value in self.params.values()))

    def copy(self) -> "ParameterSet":
        return ParameterSet(
            params={name: value.copy() for name, value in self.params.items()},
            buffers={name: value.copy() for name, value in self.buffers.items()},
            adam_m={name: value.copy() for name, value in self.adam_m.items()},
            adam_v={name: value.copy() for name, value in self.adam_v.items()},
            step=self.step,
        )



@attr.s  # pragma: no mutate
class BoundParameters(Mapping[str, Tensor]):
    """Parameters of a set exposed as tape leaves, created lazily on first access."""

    tape: Tape = attr.ib()  # pragma: no mutate
    params: ParameterSet = attr.ib()  # pragma: no mutate

    def __getitem__(self, name: str) -> Tensor:
        return self.tape.parameter(name, self.params.params[name])

    def __iter__(self) -> Iterator[str]:
        return iter(self.params.params)

    def __len__(self) -> int:
        return len(self.params.params)


def glorot(rng: np.random.Generator, shape: Tuple[int, int], gain: float = 1.0) -> np.ndarray:
    """Uniform Xavier/Glorot initialization."""
    fan_in, fan_out = shape
    limit = gain * np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def same_values(left: Mapping[str, np.ndarray], right: Mapping[str, np.ndarray]) -> bool:
    return left.keys() == right.keys() and all(np.array_equal(left[key], right[key]) for key in left)
