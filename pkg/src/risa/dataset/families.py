"""Shape families: programs that deform the template cube into the parts of a shape."""
import math
import pathlib
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import attr
import numpy as np

from .. import definitions
from ..constants import DEFAULT_TEMPLATE_LEVEL
from ..exceptions import ConfigParse, DegenerateDeformation, ZeroAreaFace
from ..loaders import load_document, validate_document
from ..mesh import PartMesh, edge_lengths, face_normals, subdivided_cube

MIN_EDGE_LENGTH = 1e-6

Range = Tuple[float, float]


def _as_range(value: Sequence[float]) -> Range:
    low, high = (float(item) for item in value)
    if low > high:
        raise ConfigParse(f"Invalid range [{low}, {high}]")
    return low, high


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class PartSpec:
    """A part as an axis-aligned box the template cube is mapped onto."""

    name: str = attr.ib()  # pragma: no mutate
    center: Tuple[float, float, float] = attr.ib(converter=tuple)  # pragma: no mutate
    size: Tuple[float, float, float] = attr.ib(converter=tuple)  # pragma: no mutate
    # Whether the sub-class radial profile applies to this part
    profiled: bool = attr.ib(default=False)  # pragma: no mutate


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class SubclassSpec:
    """Parameter ranges of one sub-class.

    The radial profile along the part height ``t ∈ [0, 1]`` is ``r(t) = (1 − taper·t)·(1 + turn·sin(π·t))``.
    """

    label: str = attr.ib()  # pragma: no mutate
    taper: Range = attr.ib(default=(0.0, 0.0), converter=_as_range)  # pragma: no mutate
    turn: Range = attr.ib(default=(0.0, 0.0), converter=_as_range)  # pragma: no mutate
    # Probability of every part slot to be present, all ones when empty
    presence: Tuple[float, ...] = attr.ib(default=(), converter=tuple)  # pragma: no mutate

    def presence_of(self, part: int) -> float:
        return self.presence[part] if self.presence else 1.0


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class FamilySpec:
    name: str = attr.ib()  # pragma: no mutate
    parts: Tuple[PartSpec, ...] = attr.ib(converter=tuple)  # pragma: no mutate
    subclasses: Tuple[SubclassSpec, ...] = attr.ib(converter=tuple)  # pragma: no mutate
    level: int = attr.ib(default=DEFAULT_TEMPLATE_LEVEL)  # pragma: no mutate
    # Relative per-shape jitter of part box sizes
    jitter: float = attr.ib(default=0.05)  # pragma: no mutate
    # Standard deviation of vertex noise, relative to the smallest box side
    noise: float = attr.ib(default=0.0)  # pragma: no mutate

    def __attrs_post_init__(self) -> None:
        for subclass in self.subclasses:
            if subclass.presence and len(subclass.presence) != len(self.parts):
                raise ConfigParse(
                    f"Sub-class `{subclass.label}` lists {len(subclass.presence)} presence probabilities "
                    f"for {len(self.parts)} parts"
                )

    @property
    def labels(self) -> List[str]:
        return [subclass.label for subclass in self.subclasses]

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "FamilySpec":
        return cls(
            name=raw["name"],
            parts=[PartSpec(**part) for part in raw["parts"]],
            subclasses=[SubclassSpec(**subclass) for subclass in raw["subclasses"]],
            level=raw.get("level", DEFAULT_TEMPLATE_LEVEL),
            jitter=raw.get("jitter", 0.05),
            noise=raw.get("noise", 0.0),
        )


def _table_legs() -> List[PartSpec]:
    return [
        PartSpec(name=f"leg{idx}", center=(x, y, 0.45), size=(0.12, 0.12, 0.9), profiled=True)
        for idx, (x, y) in enumerate(((-0.85, -0.5), (0.85, -0.5), (-0.85, 0.5), (0.85, 0.5)), start=1)
    ]


TABLES3 = FamilySpec(
    name="tables3",
    parts=[PartSpec(name="top", center=(0.0, 0.0, 0.95), size=(2.0, 1.2, 0.1)), *_table_legs()],
    subclasses=[
        SubclassSpec(label="straight-leg"),
        SubclassSpec(label="tapered-leg", taper=(0.45, 0.6)),
        SubclassSpec(label="turned-leg", turn=(0.5, 0.7)),
    ],
    level=DEFAULT_TEMPLATE_LEVEL,
    jitter=0.05,
    noise=0.001,
)

BUILTIN_FAMILIES = {TABLES3.name: TABLES3}


def load_family_spec(source: Union[str, pathlib.Path]) -> FamilySpec:
    """A built-in family by name, or a family document in YAML / JSON."""
    if isinstance(source, str) and source in BUILTIN_FAMILIES:
        return BUILTIN_FAMILIES[source]
    path = pathlib.Path(source)
    if not path.is_file():
        known = ", ".join(sorted(BUILTIN_FAMILIES))
        raise ConfigParse(f"Unknown family `{source}`: not a built-in family ({known}) and not a file")
    raw = load_document(path)
    validate_document(raw, definitions.FAMILY_SPEC, str(path))
    return FamilySpec.from_dict(raw)


def radial_profile(t: np.ndarray, taper: float, turn: float) -> np.ndarray:
    return (1.0 - taper * t) * (1.0 + turn * np.sin(math.pi * t))


def deform_part(
    part: PartSpec,
    level: int,
    taper: float = 0.0,
    turn: float = 0.0,
    scale: Optional[np.ndarray] = None,
    noise: Optional[np.ndarray] = None,
    part_label: int = 1,
) -> PartMesh:
    """Map the template cube onto the part box, bending its cross-section by the radial profile."""
    template = subdivided_cube(level)
    unit = template.vertices
    t = unit[:, 2]
    radius = radial_profile(t, taper, turn) if part.profiled else np.ones_like(t)
    local = np.column_stack([(unit[:, 0] - 0.5) * radius, (unit[:, 1] - 0.5) * radius, t - 0.5])
    size = np.asarray(part.size, dtype=np.float64) * (scale if scale is not None else 1.0)
    vertices = np.asarray(part.center, dtype=np.float64) + local * size
    if noise is not None:
        vertices = vertices + noise
    mesh = template.with_vertices(vertices).relabel(part_label)
    check_deformation(mesh, part.name)
    return mesh


def check_deformation(mesh: PartMesh, name: str) -> None:
    shortest = float(edge_lengths(mesh).min())
    if not shortest > MIN_EDGE_LENGTH:
        raise DegenerateDeformation(f"Part `{name}` has an edge of length {shortest:.3g}")
    try:
        face_normals(mesh)
    except ZeroAreaFace as exc:
        raise DegenerateDeformation(f"Part `{name}`: {exc}") from exc


def sample_shape(
    spec: FamilySpec, subclass: SubclassSpec, rng: np.random.Generator
) -> List[Optional[PartMesh]]:
    """Parts of one random shape of a sub-class, ``None`` for absent slots."""
    taper = rng.uniform(*subclass.taper)
    turn = rng.uniform(*subclass.turn)
    vertices_count = subdivided_cube(spec.level).topology.vertices_count
    parts: List[Optional[PartMesh]] = []
    for idx, part in enumerate(spec.parts):
        present = rng.random() < subclass.presence_of(idx)
        scale = rng.uniform(1.0 - spec.jitter, 1.0 + spec.jitter, size=3)
        noise = rng.normal(0.0, spec.noise * min(part.size), size=(vertices_count, 3)) if spec.noise else None
        if present:
            parts.append(
                deform_part(part, spec.level, taper=taper, turn=turn, scale=scale, noise=noise, part_label=idx + 1)
            )
        else:
            parts.append(None)
    return parts
