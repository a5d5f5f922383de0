"""Tier images: which pool items fall into the nearest neighbor, first and second tier of every query."""
import pathlib
from collections import OrderedDict
from enum import IntEnum
from typing import Dict, List, Tuple, Union

import numpy as np

from ..exceptions import EmptyIndex
from .index import DescriptorIndex, query


class Tier(IntEnum):
    none = 0
    nearest = 1
    first = 2
    second = 3


COLORS = {
    Tier.none: (255, 255, 255),
    Tier.nearest: (0, 0, 0),
    Tier.first: (255, 0, 0),
    Tier.second: (0, 0, 255),
}
GRIDLINE = (128, 128, 128)


def grouped_order(index: DescriptorIndex) -> List[int]:
    """Pool positions grouped by sub-class, classes in order of first appearance."""
    groups: Dict[str, List[int]] = OrderedDict()
    for position, label in enumerate(index.labels):
        groups.setdefault(label, []).append(position)
    return [position for members in groups.values() for position in members]


def tier_matrix(index: DescriptorIndex) -> Tuple[np.ndarray, List[int]]:
    """N×N tiers with rows and columns in grouped order, together with that order.

    Row ``i`` is a query: its rank-1 result is the nearest neighbor, ranks up to ``K`` the first tier and ranks up
    to ``2K`` the second tier, ``K`` being the number of other pool members of the query's sub-class.
    """
    if len(index) == 0:
        raise EmptyIndex("The index holds no descriptors")
    order = grouped_order(index)
    column_of = {index.ids[position]: column for column, position in enumerate(order)}
    sizes: Dict[str, int] = {}
    for label in index.labels:
        sizes[label] = sizes.get(label, 0) + 1
    matrix = np.full((len(order), len(order)), int(Tier.none), dtype=np.int64)
    if len(index) < 2:
        return matrix, order
    for row, position in enumerate(order):
        ranked = query(index, index.descriptors[position], index.ids[position])
        tier = sizes[index.labels[position]] - 1
        for rank, shape_id in enumerate(ranked.ids, start=1):
            if rank == 1:
                value = Tier.nearest
            elif rank <= tier:
                value = Tier.first
            elif rank <= 2 * tier:
                value = Tier.second
            else:
                break
            matrix[row, column_of[shape_id]] = int(value)
    return matrix, order


def render(matrix: np.ndarray, labels: List[str]) -> np.ndarray:
    """RGB pixels, with a gray line between consecutive sub-classes."""
    boundaries = [idx for idx in range(1, len(labels)) if labels[idx] != labels[idx - 1]]
    size = matrix.shape[0] + len(boundaries)
    image = np.empty((size, size, 3), dtype=np.uint8)
    image[:] = GRIDLINE
    cells = [idx + sum(1 for boundary in boundaries if boundary <= idx) for idx in range(matrix.shape[0])]
    palette = np.array([COLORS[Tier(value)] for value in range(len(Tier))], dtype=np.uint8)
    image[np.ix_(cells, cells)] = palette[matrix]
    return image


def write_ppm(path: Union[str, pathlib.Path], image: np.ndarray) -> None:
    height, width, _ = image.shape
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    pathlib.Path(path).write_bytes(header + np.ascontiguousarray(image, dtype=np.uint8).tobytes())


def tier_image(index: DescriptorIndex, path: Union[str, pathlib.Path]) -> np.ndarray:
    matrix, order = tier_matrix(index)
    image = render(matrix, [index.labels[position] for position in order])
    write_ppm(path, image)
    return image
