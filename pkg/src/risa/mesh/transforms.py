from typing import Optional

import attr
import numpy as np

from ..exceptions import InvalidRotation
from .core import PartMesh

ROTATION_TOLERANCE = 1e-9


def _validate_rotation(instance: "RigidTransform", attribute: "attr.Attribute", value: np.ndarray) -> None:
    if value.shape != (3, 3):
        raise InvalidRotation(f"Rotation must be a 3x3 matrix, got shape {value.shape}")
    if not np.allclose(value.T @ value, np.eye(3), rtol=0.0, atol=ROTATION_TOLERANCE):
        raise InvalidRotation("Rotation matrix is not orthonormal")
    if abs(np.linalg.det(value) - 1.0) > ROTATION_TOLERANCE:
        raise InvalidRotation("Rotation matrix must have determinant +1")


@attr.s(slots=True, frozen=True, eq=False)  # pragma: no mutate
class RigidTransform:
    """x -> R·x + t."""

    rotation: np.ndarray = attr.ib(
        converter=lambda value: np.array(value, dtype=np.float64), validator=_validate_rotation
    )  # pragma: no mutate
    translation: np.ndarray = attr.ib(
        factory=lambda: np.zeros(3), converter=lambda value: np.array(value, dtype=np.float64).reshape(3)
    )  # pragma: no mutate

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(rotation=np.eye(3))

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.rotation, np.eye(3)) and not np.any(self.translation))

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Transform that applies ``other`` first and then ``self``."""
        return RigidTransform(
            rotation=self.rotation @ other.rotation, translation=self.rotation @ other.translation + self.translation
        )

    def apply(self, points: np.ndarray) -> np.ndarray:
        return points @ self.rotation.T + self.translation


def quaternion_to_matrix(quaternion: np.ndarray) -> np.ndarray:
    """Rotation matrix of a unit quaternion given as (w, x, y, z)."""
    w, x, y, z = np.asarray(quaternion, dtype=np.float64) / np.linalg.norm(quaternion)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )


def matrix_to_quaternion(rotation: np.ndarray) -> np.ndarray:
    """Unit quaternion (w, x, y, z) with w >= 0 for a rotation matrix."""
    m = np.asarray(rotation, dtype=np.float64)
    trace = np.trace(m)
    if trace > 0:
        s = 2.0 * np.sqrt(trace + 1.0)
        quaternion = np.array([0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s])
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = 2.0 * np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2])
        quaternion = np.array([(m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s])
    elif m[1, 1] > m[2, 2]:
        s = 2.0 * np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2])
        quaternion = np.array([(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s])
    else:
        s = 2.0 * np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1])
        quaternion = np.array([(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s])
    quaternion /= np.linalg.norm(quaternion)
    if quaternion[0] < 0:
        quaternion = -quaternion
    return quaternion


def random_quaternion(rng: np.random.Generator) -> np.ndarray:
    """Uniformly distributed unit quaternion: a normalized 4D standard normal sample."""
    while True:
        sample = rng.standard_normal(4)
        norm = np.linalg.norm(sample)
        if norm > 1e-12:
            return sample / norm


def random_rotation(seed: Optional[int] = None, translation_scale: float = 0.0) -> RigidTransform:
    """A uniform SO(3) rotation, deterministic per seed.

    A non-zero ``translation_scale`` adds a normally distributed translation of that scale.
    """
    rng = np.random.default_rng(seed)
    rotation = quaternion_to_matrix(random_quaternion(rng))
    translation = rng.standard_normal(3) * translation_scale if translation_scale else np.zeros(3)
    return RigidTransform(rotation=rotation, translation=translation)


def apply_rigid(mesh: PartMesh, transform: RigidTransform) -> PartMesh:
    """Move the vertices, keep the connectivity."""
    if transform.is_identity:
        return mesh.with_vertices(mesh.vertices.copy())
    return mesh.with_vertices(transform.apply(mesh.vertices))


def scale_mesh(mesh: PartMesh, factor: float) -> PartMesh:
    return mesh.with_vertices(mesh.vertices * factor)
