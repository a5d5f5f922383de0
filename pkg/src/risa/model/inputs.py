from typing import List, Optional, Sequence

import attr
import numpy as np

from ..constants import STRUCT_DIM
from ..exceptions import ShapeMismatch
from ..features import BaseFeatureKind, compute_base_feature, structural_features
from ..mesh import PartMesh


@attr.s(slots=True, frozen=True, eq=False)  # pragma: no mutate
class ShapeInput:
    """Model input for one shape: per-slot base and structural features with a presence mask.

    Missing slots hold zero features and a false mask entry.
    """

    base: np.ndarray = attr.ib()  # pragma: no mutate
    structure: np.ndarray = attr.ib()  # pragma: no mutate
    mask: np.ndarray = attr.ib(converter=lambda value: np.asarray(value, dtype=bool))  # pragma: no mutate
    shape_id: Optional[str] = attr.ib(default=None)  # pragma: no mutate
    label: Optional[str] = attr.ib(default=None)  # pragma: no mutate

    def __attrs_post_init__(self) -> None:
        parts = self.mask.shape[0]
        if self.base.ndim != 3 or self.base.shape[0] != parts or self.structure.shape != (parts, STRUCT_DIM):
            raise ShapeMismatch("ShapeInput", (self.base.shape, self.structure.shape, self.mask.shape))

    @property
    def parts(self) -> int:
        return int(self.mask.shape[0])


@attr.s(slots=True, frozen=True, eq=False)  # pragma: no mutate
class ShapeBatch:
    # P×B×E×C, part-major so every PartVAE gets a contiguous block
    base: np.ndarray = attr.ib()  # pragma: no mutate
    # B×P×11
    structure: np.ndarray = attr.ib()  # pragma: no mutate
    # B×P
    mask: np.ndarray = attr.ib()  # pragma: no mutate
    ids: List[Optional[str]] = attr.ib(factory=list)  # pragma: no mutate
    labels: List[Optional[str]] = attr.ib(factory=list)  # pragma: no mutate

    @classmethod
    def from_inputs(cls, inputs: Sequence[ShapeInput]) -> "ShapeBatch":
        if not inputs:
            raise ShapeMismatch("ShapeBatch", ((0,),))
        return cls(
            base=np.stack([item.base for item in inputs], axis=1),
            structure=np.stack([item.structure for item in inputs]),
            mask=np.stack([item.mask for item in inputs]),
            ids=[item.shape_id for item in inputs],
            labels=[item.label for item in inputs],
        )

    @property
    def size(self) -> int:
        return int(self.mask.shape[0])


def shape_input_from_parts(
    parts: Sequence[Optional[PartMesh]],
    body_index: int,
    edges_count: int,
    kind: BaseFeatureKind = BaseFeatureKind.scale_sensitive,
    shape_id: Optional[str] = None,
    label: Optional[str] = None,
) -> ShapeInput:
    """Features of one shape given its part meshes in slot order, ``None`` marking a missing part."""
    base = np.stack([compute_base_feature(part, edges_count, kind) for part in parts])
    return ShapeInput(
        base=base,
        structure=structural_features(parts, body_index),
        mask=[part is not None for part in parts],
        shape_id=shape_id,
        label=label,
    )
