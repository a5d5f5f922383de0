import pathlib
from collections import Counter
from typing import Any, Dict, List, Optional, Tuple, Union

import attr

from .. import definitions
from ..constants import MANIFEST_FILE_NAME
from ..exceptions import ConfigParse
from ..loaders import load_document, validate_document, write_json

# Marker used in manifests for a part slot without a mesh
MISSING = "missing"
IDENTITY_QUATERNION = (1.0, 0.0, 0.0, 0.0)
SPLITS = ("train", "test")

PathLike = Union[str, pathlib.Path]


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class ShapeRecord:
    """One shape: its sub-class, part files in slot order, applied rotation and split."""

    id: str = attr.ib()  # pragma: no mutate
    label: str = attr.ib()  # pragma: no mutate
    # Paths relative to the manifest directory, ``None`` for a missing part
    parts: Tuple[Optional[str], ...] = attr.ib(converter=tuple)  # pragma: no mutate
    # Unit quaternion (w, x, y, z) of the rotation applied to every part
    rotation: Tuple[float, float, float, float] = attr.ib(
        default=IDENTITY_QUATERNION, converter=lambda value: tuple(float(item) for item in value)
    )  # pragma: no mutate
    split: str = attr.ib(default="train", validator=attr.validators.in_(SPLITS))  # pragma: no mutate

    @property
    def presence(self) -> List[bool]:
        return [path is not None for path in self.parts]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "label": self.label,
            "parts": [MISSING if path is None else path for path in self.parts],
            "rotation": list(self.rotation),
            "split": self.split,
        }

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "ShapeRecord":
        return cls(
            id=raw["id"],
            label=raw["label"],
            parts=[None if path == MISSING else path for path in raw["parts"]],
            rotation=raw["rotation"],
            split=raw["split"],
        )


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class DatasetManifest:
    """A class of shapes in template correspondence."""

    class_name: str = attr.ib()  # pragma: no mutate
    parts: int = attr.ib()  # pragma: no mutate
    level: int = attr.ib()  # pragma: no mutate
    shapes: Tuple[ShapeRecord, ...] = attr.ib(converter=tuple)  # pragma: no mutate
    # Directory the part paths are relative to
    root: Optional[pathlib.Path] = attr.ib(default=None, eq=False)  # pragma: no mutate

    def __attrs_post_init__(self) -> None:
        counts = Counter(shape.id for shape in self.shapes)
        duplicates = sorted(shape_id for shape_id, count in counts.items() if count > 1)
        if duplicates:
            raise ConfigParse(f"Duplicate shape ids: {', '.join(duplicates)}")
        for shape in self.shapes:
            if len(shape.parts) != self.parts:
                raise ConfigParse(f"Shape `{shape.id}` has {len(shape.parts)} part slots, expected {self.parts}")

    @property
    def labels(self) -> List[str]:
        return [shape.label for shape in self.shapes]

    @property
    def subclasses(self) -> List[str]:
        """Sub-class labels in order of first appearance."""
        return list(dict.fromkeys(self.labels))

    def select(self, split: Optional[str] = None) -> List[ShapeRecord]:
        if split is None:
            return list(self.shapes)
        return [shape for shape in self.shapes if shape.split == split]

    def resolve(self, path: str) -> pathlib.Path:
        root = self.root if self.root is not None else pathlib.Path(".")
        return root / path

    def replace_shapes(self, shapes: List[ShapeRecord], root: Optional[pathlib.Path] = None) -> "DatasetManifest":
        return attr.evolve(self, shapes=shapes, root=root if root is not None else self.root)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "class_name": self.class_name,
            "parts": self.parts,
            "level": self.level,
            "shapes": [shape.to_dict() for shape in self.shapes],
        }

    @classmethod
    def from_dict(cls, raw: Dict[str, Any], root: Optional[pathlib.Path] = None) -> "DatasetManifest":
        return cls(
            class_name=raw["class_name"],
            parts=raw["parts"],
            level=raw["level"],
            shapes=[ShapeRecord.from_dict(item) for item in raw["shapes"]],
            root=root,
        )

    def save(self, directory: Optional[PathLike] = None) -> pathlib.Path:
        directory = pathlib.Path(directory) if directory is not None else self.root
        if directory is None:
            raise ValueError("Manifest has no directory to be saved to")
        path = directory / MANIFEST_FILE_NAME
        write_json(path, self.to_dict())
        return path


def load_manifest(path: PathLike) -> DatasetManifest:
    """Load a manifest from a ``manifest.json`` file or from the directory that holds it."""
    path = pathlib.Path(path)
    if path.is_dir():
        path = path / MANIFEST_FILE_NAME
    if not path.is_file():
        raise FileNotFoundError(f"Manifest not found: {path}")
    raw = load_document(path)
    validate_document(raw, definitions.MANIFEST, str(path))
    return DatasetManifest.from_dict(raw, root=path.parent)
