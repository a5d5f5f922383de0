from typing import Optional, Tuple

import attr


class RisaError(Exception):
    """Base class for all errors raised by ``risa``."""


class MeshError(RisaError):
    """A triangle mesh violates the closed-manifold template contract."""


class NonManifold(MeshError):
    """An undirected edge is used by a number of faces different from two."""


class InconsistentWinding(MeshError):
    """Two faces traverse a shared edge in the same direction."""


class DegenerateFace(MeshError):
    """A face repeats a vertex index or refers to a non-existing vertex."""


class ZeroAreaFace(MeshError):
    """A face has no well-defined normal."""


class UnsupportedTopology(MeshError):
    """The mesh is a closed manifold, but not of genus zero."""


class InvalidRotation(MeshError):
    """A rotation matrix is not orthonormal or has a negative determinant."""


@attr.s(auto_exc=True)  # pragma: no mutate
class ObjFormatError(MeshError):
    """An OBJ file contains something outside of the supported subset."""

    path: str = attr.ib()  # pragma: no mutate
    line_number: int = attr.ib()  # pragma: no mutate
    reason: str = attr.ib()  # pragma: no mutate

    def __str__(self) -> str:
        return f"{self.path}:{self.line_number}: {self.reason}"


class FeatureError(RisaError):
    """Feature extraction failed."""


@attr.s(auto_exc=True)  # pragma: no mutate
class ConnectivityMismatch(FeatureError):
    """A part mesh does not share the template connectivity."""

    expected: int = attr.ib()  # pragma: no mutate
    actual: int = attr.ib()  # pragma: no mutate
    path: Optional[str] = attr.ib(default=None)  # pragma: no mutate

    def __str__(self) -> str:
        location = f"{self.path}: " if self.path is not None else ""
        if self.expected == self.actual:
            return f"{location}faces do not follow the template connectivity"
        return f"{location}expected {self.expected} template edges, got {self.actual}"


class DegenerateGeometry(FeatureError):
    """Vertex covariance has rank below two, principal axes are undefined."""


class NoCommonPart(FeatureError):
    """No part label is present in every shape of the class."""


class TensorError(RisaError):
    """Dense math or differentiation failed."""


@attr.s(auto_exc=True)  # pragma: no mutate
class ShapeMismatch(TensorError):
    operation: str = attr.ib()  # pragma: no mutate
    shapes: Tuple[Tuple[int, ...], ...] = attr.ib()  # pragma: no mutate

    def __str__(self) -> str:
        shapes = ", ".join(str(tuple(shape)) for shape in self.shapes)
        return f"Incompatible shapes for `{self.operation}`: {shapes}"


class NonFinite(TensorError):
    """A NaN or an infinity showed up in a computed value."""


class CycleDetected(TensorError):
    """The recorded computation graph is not acyclic."""


class CheckpointFormatError(TensorError):
    """A checkpoint file is truncated or does not start with the expected magic bytes."""


class ModelError(RisaError):
    pass


class AllPartsMissing(ModelError):
    """Attention is undefined for a shape without any present part."""


class TrainingError(RisaError):
    pass


class NoValidTriplet(TrainingError):
    """A triplet term was requested for a batch without any valid triplet."""


class DivergedLoss(TrainingError):
    """Training produced a non-finite loss."""


class RetrievalError(RisaError):
    pass


class EmptyIndex(RetrievalError):
    """The descriptor index holds no item to rank against."""


class EmptyQuerySet(RetrievalError):
    """No query could be evaluated."""


class FrozenIndex(RetrievalError):
    """A frozen descriptor index can not be modified."""


class DatasetError(RisaError):
    pass


class DegenerateDeformation(DatasetError):
    """A deformation program collapsed an edge of the template."""


class TooFewShapes(DatasetError):
    """A sub-class has too few shapes for the requested operation."""


class MissingLabels(DatasetError):
    """The sub-class labels file is absent or does not cover every shape."""


class InseparableFamily(DatasetError):
    """Generated sub-classes are not separable by their base features."""


class ConfigError(RisaError):
    pass


class ConfigParse(ConfigError):
    """A configuration document could not be parsed or failed validation."""
