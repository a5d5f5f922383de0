"""Closed manifold triangle meshes in template connectivity."""
import math
from collections import defaultdict
from typing import DefaultDict, Dict, List, Sequence, Tuple

import attr
import numpy as np

from ..exceptions import DegenerateFace, InconsistentWinding, NonManifold, UnsupportedTopology, ZeroAreaFace
from ..types import ArrayLike


def readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@attr.s(slots=True, frozen=True, eq=False)  # pragma: no mutate
class EdgeAdjacency:
    """The four neighbors of every canonical edge.

    ``n1[i]`` holds the edges that follow edge ``i`` counter-clockwise in its two adjacent faces,
    ``n2[i]`` holds the edges after those. Column 0 comes from the face that traverses the edge from its lower
    vertex index to the higher one, column 1 from the other face.
    """

    n1: np.ndarray = attr.ib()  # pragma: no mutate
    n2: np.ndarray = attr.ib()  # pragma: no mutate

    @property
    def edges_count(self) -> int:
        return int(self.n1.shape[0])

    def neighbors(self, edge: int) -> Tuple[int, int, int, int]:
        first, second = self.n1[edge], self.n2[edge]
        return int(first[0]), int(first[1]), int(second[0]), int(second[1])


@attr.s(slots=True, frozen=True, eq=False)  # pragma: no mutate
class Topology:
    """Connectivity shared by every mesh built from the same face list."""

    faces: np.ndarray = attr.ib()  # pragma: no mutate
    # Canonical undirected edges, sorted lexicographically by (low, high) endpoint index
    edges: np.ndarray = attr.ib()  # pragma: no mutate
    # Per edge: the face traversing it low -> high, then the face traversing it high -> low
    edge_faces: np.ndarray = attr.ib()  # pragma: no mutate
    adjacency: EdgeAdjacency = attr.ib()  # pragma: no mutate
    vertices_count: int = attr.ib()  # pragma: no mutate

    def same_connectivity(self, other: "Topology") -> bool:
        return self.vertices_count == other.vertices_count and np.array_equal(self.faces, other.faces)


@attr.s(slots=True, frozen=True, eq=False)  # pragma: no mutate
class PartMesh:
    """One semantic part of a shape."""

    vertices: np.ndarray = attr.ib()  # pragma: no mutate
    topology: Topology = attr.ib()  # pragma: no mutate
    part_label: int = attr.ib(default=1)  # pragma: no mutate

    @property
    def faces(self) -> np.ndarray:
        return self.topology.faces

    @property
    def edges(self) -> np.ndarray:
        return self.topology.edges

    @property
    def adjacency(self) -> EdgeAdjacency:
        return self.topology.adjacency

    @property
    def edges_count(self) -> int:
        return int(self.topology.edges.shape[0])

    def with_vertices(self, vertices: np.ndarray) -> "PartMesh":
        positions = readonly(np.array(vertices, dtype=np.float64))
        return PartMesh(vertices=positions, topology=self.topology, part_label=self.part_label)

    def relabel(self, part_label: int) -> "PartMesh":
        return PartMesh(vertices=self.vertices, topology=self.topology, part_label=part_label)


def build_topology(faces: ArrayLike, vertices_count: int) -> Topology:
    """Validate a face list and derive canonical edges with their adjacency."""
    faces = np.array(faces, dtype=np.int64).reshape(-1, 3)
    if faces.size and (faces.min() < 0 or faces.max() >= vertices_count):
        raise DegenerateFace(f"Face refers to a vertex outside of [0, {vertices_count})")
    faces_list: List[Sequence[int]] = faces.tolist()
    usage: DefaultDict[Tuple[int, int], int] = defaultdict(int)
    for face_idx, (a, b, c) in enumerate(faces_list):
        if a == b or b == c or a == c:
            raise DegenerateFace(f"Face {face_idx} repeats a vertex index: {(a, b, c)}")
        for start, end in ((a, b), (b, c), (c, a)):
            usage[(min(start, end), max(start, end))] += 1
    for edge, count in usage.items():
        if count != 2:
            raise NonManifold(f"Edge {edge} is used by {count} face(s), expected 2")
    # directed edge -> (face, local position)
    directed: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for face_idx, corners in enumerate(faces_list):
        for local in range(3):
            key = (corners[local], corners[(local + 1) % 3])
            if key in directed:
                raise InconsistentWinding(f"Edge {key} is traversed in the same direction by two faces")
            directed[key] = (face_idx, local)
    edges = sorted(usage)
    index = {edge: position for position, edge in enumerate(edges)}

    def local_edge(face_idx: int, local: int) -> int:
        corners = faces_list[face_idx]
        start, end = corners[local % 3], corners[(local + 1) % 3]
        return index[(min(start, end), max(start, end))]

    edges_count = len(edges)
    edge_faces = np.empty((edges_count, 2), dtype=np.int64)
    n1 = np.empty((edges_count, 2), dtype=np.int64)
    n2 = np.empty((edges_count, 2), dtype=np.int64)
    for position, (low, high) in enumerate(edges):
        for side, key in enumerate(((low, high), (high, low))):
            face_idx, local = directed[key]
            edge_faces[position, side] = face_idx
            n1[position, side] = local_edge(face_idx, local + 1)
            n2[position, side] = local_edge(face_idx, local + 2)
    euler = vertices_count - edges_count + len(faces_list)
    if euler != 2:
        raise UnsupportedTopology(f"Euler characteristic is {euler}, only genus-0 meshes are supported")
    return Topology(
        faces=readonly(faces),
        edges=readonly(np.array(edges, dtype=np.int64).reshape(-1, 2)),
        edge_faces=readonly(edge_faces),
        adjacency=EdgeAdjacency(n1=readonly(n1), n2=readonly(n2)),
        vertices_count=vertices_count,
    )


def build_mesh(vertices: ArrayLike, faces: ArrayLike, part_label: int = 1) -> Tuple[PartMesh, EdgeAdjacency]:
    """Build a validated mesh together with the edge adjacency used by edge convolution."""
    positions = np.array(vertices, dtype=np.float64).reshape(-1, 3)
    topology = build_topology(faces, positions.shape[0])
    mesh = PartMesh(vertices=readonly(positions), topology=topology, part_label=part_label)
    return mesh, topology.adjacency


def face_normals(mesh: PartMesh) -> np.ndarray:
    """Outward unit normals, one per face."""
    corners = mesh.vertices[mesh.faces]
    cross = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    norms = np.linalg.norm(cross, axis=1)
    scale = np.max(np.linalg.norm(corners[:, 1] - corners[:, 0], axis=1) ** 2, initial=0.0)
    degenerate = norms <= np.finfo(np.float64).eps * max(scale, np.finfo(np.float64).tiny)
    if np.any(degenerate):
        raise ZeroAreaFace(f"Face {int(np.argmax(degenerate))} has zero area")
    return cross / norms[:, None]


def edge_lengths(mesh: PartMesh) -> np.ndarray:
    """Euclidean length of every canonical edge."""
    edges = mesh.edges
    return np.linalg.norm(mesh.vertices[edges[:, 1]] - mesh.vertices[edges[:, 0]], axis=1)


def hinge_angles(n_a: np.ndarray, n_b: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """θ = π − atan2((n_a × n_b)·ê, n_a·n_b) for rows of unit normals and unit edge directions."""
    sine = np.einsum("ij,ij->i", np.cross(n_a, n_b), direction)
    cosine = np.einsum("ij,ij->i", n_a, n_b)
    return math.pi - np.arctan2(sine, cosine)


def dihedral_angles(mesh: PartMesh) -> np.ndarray:
    """Angle between the two faces of every edge, in (0, 2π).

    Flat edges give π, convex ones less than π and concave ones more than π.
    """
    normals = face_normals(mesh)
    edges = mesh.edges
    n_a = normals[mesh.topology.edge_faces[:, 0]]
    n_b = normals[mesh.topology.edge_faces[:, 1]]
    # Face ``a`` traverses the edge from the lower index to the higher one
    direction = mesh.vertices[edges[:, 1]] - mesh.vertices[edges[:, 0]]
    direction = direction / np.linalg.norm(direction, axis=1)[:, None]
    return hinge_angles(n_a, n_b, direction)


def signed_volume(mesh: PartMesh) -> float:
    """Enclosed volume by the divergence theorem, positive for outward winding."""
    corners = mesh.vertices[mesh.faces]
    return float(np.einsum("ij,ij->i", corners[:, 0], np.cross(corners[:, 1], corners[:, 2])).sum() / 6.0)
