"""Externally segmented shapes: a directory of ``<shape>_<part>.obj`` files plus a labels file."""
import logging
import pathlib
import re
from collections import Counter, defaultdict
from typing import Any, DefaultDict, Dict, Optional, Union

from .. import definitions
from ..constants import DEFAULT_TEMPLATE_LEVEL, LABELS_FILE_NAME
from ..exceptions import ConnectivityMismatch, MissingLabels
from ..loaders import load_document, validate_document, write_json
from ..mesh import PartMesh, level_for_edges, read_obj, template_topology
from .manifest import IDENTITY_QUATERNION, DatasetManifest, ShapeRecord

logger = logging.getLogger(__name__)

PART_FILE_RE = re.compile(r"^(?P<shape>.+)_(?P<part>[1-9][0-9]*)\.obj$")


def _common_level(meshes: Dict[pathlib.Path, PartMesh]) -> int:
    """The template level most meshes match, the smallest one on ties."""
    levels = Counter(level_for_edges(mesh.edges_count) for mesh in meshes.values())
    candidates = [(count, -value) for value, count in levels.items() if value >= 0]
    if not candidates:
        return DEFAULT_TEMPLATE_LEVEL
    return -max(candidates)[1]


def load_external(directory: Union[str, pathlib.Path], level: Optional[int] = None) -> DatasetManifest:
    """Build a manifest for a directory of part meshes already in template correspondence.

    The template level is the one most part files agree on unless given. Absent part files become missing parts.
    """
    directory = pathlib.Path(directory)
    labels_path = directory / LABELS_FILE_NAME
    if not labels_path.is_file():
        raise MissingLabels(f"Labels file not found: {labels_path}")
    raw = load_document(labels_path)
    validate_document(raw, definitions.LABELS, str(labels_path))
    entries: Dict[str, Any] = raw["shapes"]
    files: DefaultDict[str, Dict[int, pathlib.Path]] = defaultdict(dict)
    for path in sorted(directory.glob("*.obj")):
        match = PART_FILE_RE.match(path.name)
        if match is None:
            logger.debug("Skipping %s: not named <shape>_<part>.obj", path)
            continue
        files[match.group("shape")][int(match.group("part"))] = path
    unlabelled = sorted(set(files) - set(entries))
    if unlabelled:
        raise MissingLabels(f"No label for shape(s): {', '.join(unlabelled)}")
    parts_count = raw.get("parts") or max((max(slots) for slots in files.values()), default=0)
    meshes: Dict[pathlib.Path, PartMesh] = {
        path: read_obj(path, part_label=slot) for slots in files.values() for slot, path in slots.items()
    }
    if level is None:
        level = _common_level(meshes)
    topology = template_topology(level)
    for path, mesh in sorted(meshes.items()):
        if not mesh.topology.same_connectivity(topology):
            raise ConnectivityMismatch(
                expected=int(topology.edges.shape[0]), actual=mesh.edges_count, path=str(path)
            )
    shapes = []
    for shape_id, entry in entries.items():
        if isinstance(entry, str):
            entry = {"label": entry}
        slots = files.get(shape_id, {})
        shapes.append(
            ShapeRecord(
                id=shape_id,
                label=entry["label"],
                parts=[slots[slot].name if slot in slots else None for slot in range(1, parts_count + 1)],
                rotation=entry.get("rotation", IDENTITY_QUATERNION),
                split=entry.get("split", "train"),
            )
        )
    logger.info("Loaded %d external shapes from %s", len(shapes), directory)
    return DatasetManifest(
        class_name=raw.get("class_name", directory.name),
        parts=parts_count,
        level=level,
        shapes=shapes,
        root=directory,
    )


def write_labels(manifest: DatasetManifest, directory: Optional[Union[str, pathlib.Path]] = None) -> pathlib.Path:
    """Labels file describing ``manifest`` well enough for ``load_external`` to rebuild it."""
    directory = pathlib.Path(directory) if directory is not None else manifest.root
    if directory is None:
        raise ValueError("Manifest has no directory, pass `directory`")
    path = directory / LABELS_FILE_NAME
    write_json(
        path,
        {
            "class_name": manifest.class_name,
            "parts": manifest.parts,
            "shapes": {
                shape.id: {"label": shape.label, "split": shape.split, "rotation": list(shape.rotation)}
                for shape in manifest.shapes
            },
        },
    )
    return path
