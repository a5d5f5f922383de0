import csv
import pathlib
from typing import Union

import numpy as np

from ..exceptions import ConfigParse
from .index import DescriptorIndex

PathLike = Union[str, pathlib.Path]


def write_descriptors(path: PathLike, index: DescriptorIndex) -> None:
    """CSV with an ``id,label,d_0..d_{n-1}`` header, values with 17 significant digits."""
    dimension = index.matrix.shape[1]
    with open(path, "w", newline="", encoding="utf-8") as fd:
        writer = csv.writer(fd, lineterminator="\n")
        writer.writerow(["id", "label", *(f"d_{idx}" for idx in range(dimension))])
        for shape_id, label, descriptor in zip(index.ids, index.labels, index.descriptors):
            writer.writerow([shape_id, label, *(f"{value:.17g}" for value in descriptor)])


def read_descriptors(path: PathLike) -> DescriptorIndex:
    """A frozen index from a descriptor CSV."""
    with open(path, newline="", encoding="utf-8") as fd:
        reader = csv.reader(fd)
        header = next(reader, None)
        if header is None or header[:2] != ["id", "label"]:
            raise ConfigParse(f"{path}: expected a header starting with `id,label`")
        dimension = len(header) - 2
        ids, labels, rows = [], [], []
        for line_number, row in enumerate(reader, start=2):
            if len(row) != dimension + 2:
                raise ConfigParse(f"{path}:{line_number}: expected {dimension + 2} columns, got {len(row)}")
            ids.append(row[0])
            labels.append(row[1])
            try:
                rows.append([float(value) for value in row[2:]])
            except ValueError as exc:
                raise ConfigParse(f"{path}:{line_number}: {exc}") from exc
    return DescriptorIndex.from_arrays(ids, labels, np.array(rows, dtype=np.float64).reshape(len(rows), dimension))
