"""Rotation-invariant per-part features.

The base feature describes a part by its per-edge geometry, the structural feature places a part relative to the
body part of its shape.
"""
import logging
from enum import Enum
from typing import Dict, Mapping, Optional, Sequence

import attr
import numpy as np

from .constants import STRUCT_DIM
from .exceptions import ConnectivityMismatch, DegenerateGeometry, NoCommonPart
from .mesh import PartMesh, dihedral_angles, edge_lengths, signed_volume

logger = logging.getLogger(__name__)

# Third central moments below this are treated as zero when fixing axis signs
MOMENT_TOLERANCE = 1e-12
COINCIDENT_CENTERS = 1e-9


class BaseFeatureKind(Enum):
    # (edge length, dihedral angle) per edge
    scale_sensitive = "scale-sensitive"
    # (dihedral angle, opposite angles, length-to-height ratios) per edge
    scale_invariant = "scale-invariant"

    @property
    def channels(self) -> int:
        return {BaseFeatureKind.scale_sensitive: 2, BaseFeatureKind.scale_invariant: 5}[self]


def _check_connectivity(part: PartMesh, edges_count: int) -> None:
    if part.edges_count != edges_count:
        raise ConnectivityMismatch(expected=edges_count, actual=part.edges_count)


def base_feature(part: Optional[PartMesh], edges_count: int) -> np.ndarray:
    """E×2 matrix of edge lengths and dihedral angles, zeros for a missing part."""
    if part is None:
        return np.zeros((edges_count, 2))
    _check_connectivity(part, edges_count)
    return np.column_stack([edge_lengths(part), dihedral_angles(part)])


def _opposite_vertices(part: PartMesh) -> np.ndarray:
    """For every edge, the vertex opposite to it in each of its two faces."""
    faces = part.faces[part.topology.edge_faces]
    edges = part.edges
    is_endpoint = (faces == edges[:, None, 0, None]) | (faces == edges[:, None, 1, None])
    return faces[~is_endpoint].reshape(-1, 2)


def scale_invariant_feature(part: Optional[PartMesh], edges_count: int) -> np.ndarray:
    """E×5 matrix: dihedral angle, the two opposite inner angles and the two edge-to-height ratios.

    Pairs coming from the two adjacent faces are sorted so the result does not depend on face order.
    """
    if part is None:
        return np.zeros((edges_count, 5))
    _check_connectivity(part, edges_count)
    vertices = part.vertices
    start, end = vertices[part.edges[:, 0]], vertices[part.edges[:, 1]]
    length = np.linalg.norm(end - start, axis=1)
    angles = np.empty((edges_count, 2))
    ratios = np.empty((edges_count, 2))
    opposite = _opposite_vertices(part)
    for side in range(2):
        apex = vertices[opposite[:, side]]
        to_start, to_end = start - apex, end - apex
        cross = np.linalg.norm(np.cross(to_start, to_end), axis=1)
        dot = np.einsum("ij,ij->i", to_start, to_end)
        angles[:, side] = np.arctan2(cross, dot)
        # height of the triangle over the edge is twice its area divided by the edge length
        ratios[:, side] = length ** 2 / cross
    return np.column_stack([dihedral_angles(part), np.sort(angles, axis=1), np.sort(ratios, axis=1)])


def compute_base_feature(part: Optional[PartMesh], edges_count: int, kind: BaseFeatureKind) -> np.ndarray:
    if kind is BaseFeatureKind.scale_invariant:
        return scale_invariant_feature(part, edges_count)
    return base_feature(part, edges_count)


@attr.s(slots=True, frozen=True, eq=False)  # pragma: no mutate
class PrincipalFrame:
    # Rows are unit axes sorted by descending eigenvalue
    axes: np.ndarray = attr.ib()  # pragma: no mutate
    eigenvalues: np.ndarray = attr.ib()  # pragma: no mutate
    centroid: np.ndarray = attr.ib()  # pragma: no mutate

    def to_local(self, vector: np.ndarray) -> np.ndarray:
        return self.axes @ vector


def principal_frame(part: PartMesh) -> PrincipalFrame:
    """Principal axes of the vertex covariance with deterministic signs.

    Each axis is oriented so the third central moment of the vertex projections is non-negative. When that moment
    vanishes, the largest-magnitude component of the axis is made positive instead.
    """
    vertices = part.vertices
    if vertices.shape[0] < 4:
        raise DegenerateGeometry("At least 4 vertices are needed for principal axes")
    center = vertices.mean(axis=0)
    centered = vertices - center
    covariance = centered.T @ centered / vertices.shape[0]
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    axes = eigenvectors[:, order].T.copy()
    if eigenvalues[1] <= 1e-12 * max(eigenvalues[0], np.finfo(np.float64).tiny):
        raise DegenerateGeometry(f"Vertex covariance has rank < 2 (eigenvalues {eigenvalues.tolist()})")
    for idx in range(3):
        moment = float(np.mean((centered @ axes[idx]) ** 3))
        if abs(moment) >= MOMENT_TOLERANCE:
            if moment < 0:
                axes[idx] = -axes[idx]
        elif axes[idx][np.argmax(np.abs(axes[idx]))] < 0:
            axes[idx] = -axes[idx]
    return PrincipalFrame(axes=axes, eigenvalues=eigenvalues, centroid=center)


def part_volumes(parts: Mapping[int, Optional[PartMesh]]) -> Dict[int, float]:
    return {label: signed_volume(part) for label, part in parts.items() if part is not None}


def select_body_part(volumes: Sequence[Mapping[int, float]]) -> int:
    """Label of the body part: present in every shape and largest on average.

    ``volumes`` holds one ``{label: volume}`` mapping per shape, with missing parts left out. Ties go to the
    smallest label.
    """
    if not volumes:
        raise NoCommonPart("No shapes to select a body part from")
    common = set(volumes[0])
    for shape in volumes[1:]:
        common &= set(shape)
    if not common:
        raise NoCommonPart("No part label is present in every shape")
    means = {label: float(np.mean([shape[label] for shape in volumes])) for label in sorted(common)}
    best = max(means.values())
    selected = min(label for label, mean in means.items() if mean == best)
    logger.debug("Selected body part %d with mean volume %.6g", selected, best)
    return selected


def self_structural_feature() -> np.ndarray:
    feature = np.zeros(STRUCT_DIM)
    feature[0] = 1.0
    feature[2] = 1.0
    feature[6] = 1.0
    return feature


def structural_feature(
    part: Optional[PartMesh],
    body: PartMesh,
    part_frame: Optional[PrincipalFrame] = None,
    body_frame: Optional[PrincipalFrame] = None,
) -> np.ndarray:
    """11 numbers placing ``part`` relative to ``body``.

    Existence flag, distance between centers, |cos| between the part's first two axes and the body's three axes,
    and the unit direction to the part's center in the body's frame. Frames can be passed in when already known.
    """
    if part is None:
        return np.zeros(STRUCT_DIM)
    if part is body:
        return self_structural_feature()
    body_frame = body_frame or principal_frame(body)
    part_frame = part_frame or principal_frame(part)
    offset = part_frame.centroid - body_frame.centroid
    distance = float(np.linalg.norm(offset))
    cosines = np.abs(part_frame.axes[:2] @ body_frame.axes.T)
    if distance < COINCIDENT_CENTERS:
        direction = np.zeros(3)
    else:
        direction = body_frame.to_local(offset / distance)
    return np.concatenate([[1.0, distance], np.clip(cosines, 0.0, 1.0).reshape(-1), direction])


def structural_features(parts: Sequence[Optional[PartMesh]], body_index: int) -> np.ndarray:
    """P×11 structural features of every part slot of one shape."""
    body = parts[body_index]
    if body is None:
        raise NoCommonPart(f"Body part slot {body_index + 1} is missing")
    body_frame = principal_frame(body)
    rows = []
    for idx, part in enumerate(parts):
        if idx == body_index:
            rows.append(self_structural_feature())
        else:
            rows.append(structural_feature(part, body, body_frame=body_frame))
    return np.stack(rows)
