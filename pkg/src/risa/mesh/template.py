from functools import lru_cache
from typing import List, Tuple

import numpy as np

from .core import PartMesh, Topology, build_mesh

# Corner ``i`` of the unit cube sits at (i >> 2 & 1, i >> 1 & 1, i & 1)
CUBE_FACES = (
    (0, 1, 3),
    (0, 3, 2),
    (4, 6, 7),
    (4, 7, 5),
    (0, 4, 5),
    (0, 5, 1),
    (2, 3, 7),
    (2, 7, 6),
    (0, 2, 6),
    (0, 6, 4),
    (1, 5, 7),
    (1, 7, 3),
)


def _cube_corners() -> np.ndarray:
    return np.array([((idx >> 2) & 1, (idx >> 1) & 1, idx & 1) for idx in range(8)], dtype=np.float64)


def _subdivide(vertices: np.ndarray, faces: np.ndarray, edges: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Midpoint 1-to-4 subdivision. The midpoint of canonical edge ``k`` gets index ``V + k``."""
    vertices_count = vertices.shape[0]
    midpoints = (vertices[edges[:, 0]] + vertices[edges[:, 1]]) / 2.0
    index = {(int(low), int(high)): vertices_count + position for position, (low, high) in enumerate(edges)}

    def midpoint(start: int, end: int) -> int:
        return index[(min(start, end), max(start, end))]

    new_faces: List[Tuple[int, int, int]] = []
    for a, b, c in faces.tolist():
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        new_faces.extend(((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)))
    return np.concatenate([vertices, midpoints]), np.array(new_faces, dtype=np.int64)


@lru_cache(maxsize=None)
def subdivided_cube(level: int = 1) -> PartMesh:
    """Unit cube ``[0, 1]^3`` refined ``level`` times, vertices kept on the cube surface.

    Every part mesh of a dataset shares this connectivity.
    """
    if level < 0:
        raise ValueError("Subdivision level must be non-negative")
    mesh, _ = build_mesh(_cube_corners(), CUBE_FACES)
    for _ in range(level):
        vertices, faces = _subdivide(mesh.vertices, mesh.faces, mesh.edges)
        mesh, _ = build_mesh(vertices, faces)
    return mesh


def template_topology(level: int) -> Topology:
    return subdivided_cube(level).topology


def level_for_edges(edges_count: int) -> int:
    """Template level whose edge count equals ``edges_count``, -1 when no level matches."""
    level, current = 0, 18
    while current < edges_count:
        level, current = level + 1, current * 4
    return level if current == edges_count else -1
