from typing import List, Optional, Sequence

import attr
import numpy as np

from ..exceptions import EmptyIndex, FrozenIndex, ShapeMismatch
from ..types import ArrayLike


@attr.s(slots=True)  # pragma: no mutate
class DescriptorIndex:
    """Shape descriptors with their ids and sub-class labels, as parallel sequences."""

    ids: List[str] = attr.ib(factory=list)  # pragma: no mutate
    labels: List[str] = attr.ib(factory=list)  # pragma: no mutate
    descriptors: List[np.ndarray] = attr.ib(factory=list)  # pragma: no mutate
    frozen: bool = attr.ib(default=False)  # pragma: no mutate
    _matrix: Optional[np.ndarray] = attr.ib(default=None, init=False, repr=False)  # pragma: no mutate

    @classmethod
    def from_arrays(cls, ids: Sequence[str], labels: Sequence[str], descriptors: ArrayLike) -> "DescriptorIndex":
        """A frozen index."""
        matrix = np.asarray(descriptors, dtype=np.float64)
        if not len(ids) == len(labels) == len(matrix):
            raise ShapeMismatch("DescriptorIndex", ((len(ids),), (len(labels),), matrix.shape))
        index = cls()
        for shape_id, label, descriptor in zip(ids, labels, matrix):
            index.add(shape_id, label, descriptor)
        return index.freeze()

    def __len__(self) -> int:
        return len(self.ids)

    def add(self, shape_id: str, label: str, descriptor: ArrayLike) -> None:
        if self.frozen:
            raise FrozenIndex("Can not add descriptors to a frozen index")
        vector = np.array(descriptor, dtype=np.float64).reshape(-1)
        if self.descriptors and vector.shape != self.descriptors[0].shape:
            raise ShapeMismatch("DescriptorIndex.add", (self.descriptors[0].shape, vector.shape))
        self.ids.append(shape_id)
        self.labels.append(label)
        self.descriptors.append(vector)

    def freeze(self) -> "DescriptorIndex":
        if not self.frozen:
            self.frozen = True
            if self.descriptors:
                matrix = np.stack(self.descriptors)
                matrix.setflags(write=False)
                self._matrix = matrix
        return self

    @property
    def matrix(self) -> np.ndarray:
        """N×d descriptor matrix of a frozen index."""
        self.freeze()
        if self._matrix is None:
            raise EmptyIndex("The index holds no descriptors")
        return self._matrix

    def position(self, shape_id: str) -> int:
        return self.ids.index(shape_id)

    def descriptor_of(self, shape_id: str) -> np.ndarray:
        return self.descriptors[self.position(shape_id)]

    def label_of(self, shape_id: str) -> str:
        return self.labels[self.position(shape_id)]

    def subset(self, ids: Sequence[str]) -> "DescriptorIndex":
        positions = [self.position(shape_id) for shape_id in ids]
        return DescriptorIndex.from_arrays(
            [self.ids[idx] for idx in positions],
            [self.labels[idx] for idx in positions],
            np.stack([self.descriptors[idx] for idx in positions]) if positions else np.zeros((0, 0)),
        )


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class RankedList:
    """Indexed shapes by ascending distance to a query, ties broken by ascending id."""

    ids: List[str] = attr.ib()  # pragma: no mutate
    labels: List[str] = attr.ib()  # pragma: no mutate
    distances: List[float] = attr.ib()  # pragma: no mutate

    def __len__(self) -> int:
        return len(self.ids)

    def top(self, k: int) -> "RankedList":
        return RankedList(ids=self.ids[:k], labels=self.labels[:k], distances=self.distances[:k])


def query(index: DescriptorIndex, descriptor: ArrayLike, query_id: Optional[str] = None) -> RankedList:
    """Exhaustive Euclidean ranking of the index, the query itself left out.

    Ordering only depends on squared distances, so any increasing transform of them ranks the same way.
    """
    if len(index) == 0:
        raise EmptyIndex("The index holds no descriptors")
    matrix = index.matrix
    vector = np.asarray(descriptor, dtype=np.float64).reshape(-1)
    if vector.shape[0] != matrix.shape[1]:
        raise ShapeMismatch("query", (matrix.shape, vector.shape))
    differences = matrix - vector
    squared = np.einsum("ij,ij->i", differences, differences)
    candidates = [idx for idx, shape_id in enumerate(index.ids) if shape_id != query_id]
    if not candidates:
        raise EmptyIndex("The index holds no descriptor apart from the query")
    order = sorted(candidates, key=lambda idx: (squared[idx], index.ids[idx]))
    return RankedList(
        ids=[index.ids[idx] for idx in order],
        labels=[index.labels[idx] for idx in order],
        distances=[float(np.sqrt(squared[idx])) for idx in order],
    )
