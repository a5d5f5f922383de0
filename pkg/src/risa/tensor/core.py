"""Dense double-precision tensors with a reverse-mode tape.

Every operation is a method of :class:`Tape`. It computes the forward value with numpy and records a node holding
the rule that maps the output gradient to input gradients. :meth:`Tape.backward` replays the nodes in reverse.
"""
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union, cast

import attr
import numpy as np

from ..exceptions import CycleDetected, ShapeMismatch

Number = Union[int, float]
BackwardRule = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


@attr.s(slots=True, eq=False, repr=False)  # pragma: no mutate
class Tensor:
    data: np.ndarray = attr.ib()  # pragma: no mutate
    tape: Optional["Tape"] = attr.ib(default=None)  # pragma: no mutate
    # Position of the producing node on the tape, None for constants
    node: Optional[int] = attr.ib(default=None)  # pragma: no mutate
    name: Optional[str] = attr.ib(default=None)  # pragma: no mutate

    # Makes numpy defer to the reflected operators below
    __array_ufunc__ = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def requires_grad(self) -> bool:
        return self.node is not None

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, name={self.name!r})"

    def _tape(self, other: object = None) -> "Tape":
        tape = self.tape or getattr(other, "tape", None)
        if tape is None:
            raise ValueError("Tensor is not attached to a tape")
        return tape

    def __add__(self, other: "Operand") -> "Tensor":
        return self._tape(other).add(self, other)

    __radd__ = __add__

    def __sub__(self, other: "Operand") -> "Tensor":
        return self._tape(other).sub(self, other)

    def __rsub__(self, other: "Operand") -> "Tensor":
        return self._tape(other).sub(other, self)

    def __mul__(self, other: "Operand") -> "Tensor":
        return self._tape(other).mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other: "Operand") -> "Tensor":
        return self._tape(other).div(self, other)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return self._tape(other).matmul(self, other)

    def __neg__(self) -> "Tensor":
        return self._tape().scale(self, -1.0)


Operand = Union[Tensor, np.ndarray, Number]


@attr.s(slots=True)  # pragma: no mutate
class Node:
    inputs: Tuple[Optional[int], ...] = attr.ib()  # pragma: no mutate
    rule: BackwardRule = attr.ib()  # pragma: no mutate
    shape: Tuple[int, ...] = attr.ib()  # pragma: no mutate


def unbroadcast(gradient: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum ``gradient`` over the axes that broadcasting added or stretched to reach ``shape``."""
    while gradient.ndim > len(shape):
        gradient = gradient.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and gradient.shape[axis] != 1:
            gradient = gradient.sum(axis=axis, keepdims=True)
    return gradient


@attr.s(frozen=True)  # pragma: no mutate
class Gradients(Mapping[str, np.ndarray]):
    """Gradients of a scalar with respect to every named leaf of a tape.

    Leaves the scalar does not depend on get zero gradients.
    """

    values: Dict[str, np.ndarray] = attr.ib()  # pragma: no mutate

    def __getitem__(self, name: str) -> np.ndarray:
        return self.values[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)


@attr.s(slots=True)  # pragma: no mutate
class Tape:
    """Records operations of a single forward pass."""

    nodes: List[Node] = attr.ib(factory=list)  # pragma: no mutate
    leaves: Dict[str, Tensor] = attr.ib(factory=dict)  # pragma: no mutate

    # Leaves and constants

    def parameter(self, name: str, value: np.ndarray) -> Tensor:
        """A named differentiable leaf."""
        if name in self.leaves:
            return self.leaves[name]
        tensor = self._record(np.array(value, dtype=np.float64), (), lambda gradient: ())
        tensor.name = name
        self.leaves[name] = tensor
        return tensor

    def constant(self, value: Union[np.ndarray, Number]) -> Tensor:
        return Tensor(data=np.array(value, dtype=np.float64), tape=self)

    def detach(self, value: Tensor) -> Tensor:
        """Same values, no gradient flows back through it."""
        return self.constant(value.data.copy())

    def _as_tensor(self, value: Operand) -> Tensor:
        if isinstance(value, Tensor):
            return value
        return self.constant(value)

    def _record(self, data: np.ndarray, inputs: Sequence[Tensor], rule: BackwardRule) -> Tensor:
        if not any(item.requires_grad for item in inputs) and inputs:
            return Tensor(data=data, tape=self)
        node = Node(inputs=tuple(item.node for item in inputs), rule=rule, shape=tuple(data.shape))
        self.nodes.append(node)
        return Tensor(data=data, tape=self, node=len(self.nodes) - 1)

    # Elementwise arithmetic

    def add(self, left: Operand, right: Operand) -> Tensor:
        a, b = self._as_tensor(left), self._as_tensor(right)
        data = self._broadcast("add", np.add, a, b)
        return self._record(data, (a, b), lambda g: (unbroadcast(g, a.shape), unbroadcast(g, b.shape)))

    def sub(self, left: Operand, right: Operand) -> Tensor:
        a, b = self._as_tensor(left), self._as_tensor(right)
        data = self._broadcast("sub", np.subtract, a, b)
        return self._record(data, (a, b), lambda g: (unbroadcast(g, a.shape), unbroadcast(-g, b.shape)))

    def mul(self, left: Operand, right: Operand) -> Tensor:
        a, b = self._as_tensor(left), self._as_tensor(right)
        data = self._broadcast("mul", np.multiply, a, b)
        return self._record(
            data, (a, b), lambda g: (unbroadcast(g * b.data, a.shape), unbroadcast(g * a.data, b.shape))
        )

    def div(self, left: Operand, right: Operand) -> Tensor:
        a, b = self._as_tensor(left), self._as_tensor(right)
        data = self._broadcast("div", np.divide, a, b)
        return self._record(
            data,
            (a, b),
            lambda g: (unbroadcast(g / b.data, a.shape), unbroadcast(-g * a.data / b.data ** 2, b.shape)),
        )

    def scale(self, value: Tensor, factor: float) -> Tensor:
        return self._record(value.data * factor, (value,), lambda g: (g * factor,))

    def _broadcast(self, operation: str, function: Callable, a: Tensor, b: Tensor) -> np.ndarray:
        try:
            return function(a.data, b.data)
        except ValueError:
            raise ShapeMismatch(operation, (a.shape, b.shape))

    # Elementwise functions

    def power(self, value: Tensor, exponent: float) -> Tensor:
        data = value.data ** exponent
        return self._record(data, (value,), lambda g: (g * exponent * value.data ** (exponent - 1),))

    def square(self, value: Tensor) -> Tensor:
        return self._record(value.data ** 2, (value,), lambda g: (2.0 * g * value.data,))

    def exp(self, value: Tensor) -> Tensor:
        data = np.exp(value.data)
        return self._record(data, (value,), lambda g: (g * data,))

    def log(self, value: Tensor) -> Tensor:
        return self._record(np.log(value.data), (value,), lambda g: (g / value.data,))

    def leaky_relu(self, value: Tensor, slope: float) -> Tensor:
        positive = value.data >= 0
        data = np.where(positive, value.data, slope * value.data)
        return self._record(data, (value,), lambda g: (np.where(positive, g, slope * g),))

    def relu(self, value: Tensor) -> Tensor:
        return self.leaky_relu(value, 0.0)

    # Linear algebra and reductions

    def matmul(self, left: Tensor, right: Tensor) -> Tensor:
        """``left`` of shape (..., n, k) times a matrix of shape (k, m)."""
        a, b = self._as_tensor(left), self._as_tensor(right)
        if b.data.ndim != 2 or a.data.ndim < 1 or a.shape[-1] != b.shape[0]:
            raise ShapeMismatch("matmul", (a.shape, b.shape))
        data = a.data @ b.data

        def rule(g: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            flat_a = a.data.reshape(-1, a.shape[-1])
            flat_g = g.reshape(-1, b.shape[1])
            return g @ b.data.T, flat_a.T @ flat_g

        return self._record(data, (a, b), rule)

    def sum(self, value: Tensor, axis: Union[None, int, Tuple[int, ...]] = None, keepdims: bool = False) -> Tensor:
        data = value.data.sum(axis=axis, keepdims=keepdims)

        def rule(g: np.ndarray) -> Tuple[np.ndarray]:
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            return (np.broadcast_to(g, value.shape).copy(),)

        return self._record(np.asarray(data), (value,), rule)

    def mean(self, value: Tensor, axis: Union[None, int, Tuple[int, ...]] = None, keepdims: bool = False) -> Tensor:
        total = self.sum(value, axis=axis, keepdims=keepdims)
        count = value.data.size // max(total.data.size, 1)
        return self.scale(total, 1.0 / count)

    # Shape manipulation

    def reshape(self, value: Tensor, shape: Sequence[int]) -> Tensor:
        try:
            data = value.data.reshape(shape)
        except ValueError:
            raise ShapeMismatch("reshape", (value.shape, tuple(shape)))
        return self._record(data, (value,), lambda g: (g.reshape(value.shape),))

    def concat(self, values: Sequence[Tensor], axis: int = -1) -> Tensor:
        items = [self._as_tensor(value) for value in values]
        try:
            data = np.concatenate([item.data for item in items], axis=axis)
        except ValueError:
            raise ShapeMismatch("concat", tuple(item.shape for item in items))
        sizes = np.cumsum([item.shape[axis] for item in items])[:-1]
        return self._record(data, items, lambda g: tuple(np.split(g, sizes, axis=axis)))

    def take(self, value: Tensor, indices: np.ndarray, axis: int) -> Tensor:
        """Gather along ``axis``; repeated indices accumulate gradients."""
        indices = np.asarray(indices, dtype=np.int64)
        data = np.take(value.data, indices, axis=axis)

        def rule(g: np.ndarray) -> Tuple[np.ndarray]:
            gradient = np.zeros_like(value.data)
            moved = np.moveaxis(gradient, axis, 0)
            np.add.at(moved, indices, np.moveaxis(g, axis, 0))
            return (gradient,)

        return self._record(data, (value,), rule)

    def index(self, value: Tensor, position: int, axis: int = 0) -> Tensor:
        """Select one slice along ``axis``, dropping that axis."""
        data = np.take(value.data, position, axis=axis)

        def rule(g: np.ndarray) -> Tuple[np.ndarray]:
            gradient = np.zeros_like(value.data)
            np.moveaxis(gradient, axis, 0)[position] = g
            return (gradient,)

        return self._record(np.asarray(data), (value,), rule)

    def stack(self, values: Sequence[Tensor], axis: int = 0) -> Tensor:
        expanded = [self.reshape(item, _with_axis(item.shape, axis)) for item in map(self._as_tensor, values)]
        return self.concat(expanded, axis=axis)

    # Differentiation

    def backward(self, loss: Tensor) -> Gradients:
        """Gradients of the scalar ``loss`` with respect to every leaf of the tape."""
        if loss.data.size != 1:
            raise ShapeMismatch("backward", (loss.shape,))
        accumulated: Dict[int, np.ndarray] = {}
        if loss.node is not None:
            accumulated[loss.node] = np.ones(self.nodes[loss.node].shape)
        for position in range(len(self.nodes) - 1, -1, -1):
            gradient = accumulated.pop(position, None)
            if gradient is None:
                continue
            node = self.nodes[position]
            if not node.inputs:
                # Leaves keep their gradients
                accumulated[position] = gradient
                continue
            for source, contribution in zip(node.inputs, node.rule(gradient)):
                if source is None or contribution is None:
                    continue
                if source >= position:
                    raise CycleDetected(f"Node {position} depends on node {source} recorded after it")
                if source in accumulated:
                    accumulated[source] = accumulated[source] + contribution
                else:
                    accumulated[source] = contribution
        values = {}
        for name, leaf in self.leaves.items():
            values[name] = accumulated.get(cast(int, leaf.node), np.zeros_like(leaf.data))
        return Gradients(values=values)


def _with_axis(shape: Tuple[int, ...], axis: int) -> Tuple[int, ...]:
    if axis < 0:
        axis += len(shape) + 1
    return shape[:axis] + (1,) + shape[axis:]


def backward(tape: Tape, loss: Tensor) -> Gradients:
    return tape.backward(loss)
