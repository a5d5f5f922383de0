"""A strict OBJ subset: ``v x y z`` and triangular ``f i j k`` lines with 1-based indices."""
import logging
import pathlib
from typing import List, Optional, Tuple, Union

import numpy as np

from ..exceptions import ObjFormatError
from .core import PartMesh, Topology, build_mesh, readonly

logger = logging.getLogger(__name__)

PathLike = Union[str, pathlib.Path]


def parse_obj(path: PathLike) -> Tuple[List[Tuple[float, float, float]], List[Tuple[int, int, int]]]:
    vertices: List[Tuple[float, float, float]] = []
    faces: List[Tuple[int, int, int]] = []
    name = str(path)
    with open(path, encoding="utf-8") as fd:
        for line_number, raw_line in enumerate(fd, start=1):
            line = raw_line.strip()
            if not line or line.startswith("#"):
                continue
            keyword, *values = line.split()
            if keyword == "v":
                if len(values) != 3:
                    raise ObjFormatError(name, line_number, "vertex must have exactly 3 coordinates")
                try:
                    x, y, z = (float(value) for value in values)
                except ValueError:
                    raise ObjFormatError(name, line_number, "vertex coordinates must be numbers")
                vertices.append((x, y, z))
            elif keyword == "f":
                if len(values) != 3:
                    raise ObjFormatError(name, line_number, "only triangular faces are supported")
                if any("/" in value for value in values):
                    raise ObjFormatError(name, line_number, "texture and normal indices are not supported")
                try:
                    i, j, k = (int(value) for value in values)
                except ValueError:
                    raise ObjFormatError(name, line_number, "face indices must be integers")
                if min(i, j, k) < 1:
                    raise ObjFormatError(name, line_number, "face indices are 1-based and positive")
                faces.append((i - 1, j - 1, k - 1))
            else:
                raise ObjFormatError(name, line_number, f"unsupported statement `{keyword}`")
    return vertices, faces


def read_obj(path: PathLike, part_label: int = 1, template: Optional[Topology] = None) -> PartMesh:
    """Load a part mesh.

    When ``template`` is given and the face list matches it, the template connectivity is reused.
    """
    vertices, faces = parse_obj(path)
    if (
        template is not None
        and len(vertices) == template.vertices_count
        and [tuple(face) for face in template.faces.tolist()] == faces
    ):
        positions = readonly(np.array(vertices, dtype=np.float64))
        return PartMesh(vertices=positions, topology=template, part_label=part_label)
    mesh, _ = build_mesh(vertices, faces, part_label=part_label)
    return mesh


def write_obj(path: PathLike, mesh: PartMesh) -> None:
    lines = [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in mesh.vertices.tolist()]
    lines.extend(f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces.tolist())
    pathlib.Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug("Wrote %d vertices to %s", mesh.vertices.shape[0], path)
