import logging
from typing import List, Optional, Tuple

import attr

from ..exceptions import ConnectivityMismatch
from ..features import BaseFeatureKind, part_volumes, select_body_part
from ..mesh import EdgeAdjacency, PartMesh, read_obj, template_topology
from ..model import ShapeInput, shape_input_from_parts
from ..threadpool import ordered_map
from .manifest import DatasetManifest, ShapeRecord

logger = logging.getLogger(__name__)


@attr.s(slots=True)  # pragma: no mutate
class FeatureSet:
    """Model inputs of the shapes of a manifest, in manifest order."""

    inputs: List[ShapeInput] = attr.ib()  # pragma: no mutate
    adjacency: EdgeAdjacency = attr.ib()  # pragma: no mutate
    edges_count: int = attr.ib()  # pragma: no mutate
    parts: int = attr.ib()  # pragma: no mutate
    # 1-based slot of the body part
    body_label: int = attr.ib()  # pragma: no mutate
    kind: BaseFeatureKind = attr.ib(default=BaseFeatureKind.scale_sensitive)  # pragma: no mutate

    @property
    def ids(self) -> List[str]:
        return [str(item.shape_id) for item in self.inputs]

    @property
    def labels(self) -> List[str]:
        return [str(item.label) for item in self.inputs]



def load_parts(manifest: DatasetManifest, shape: ShapeRecord) -> List[Optional[PartMesh]]:
    """Part meshes of a shape in slot order, checked against the template connectivity."""
    topology = template_topology(manifest.level)
    parts: List[Optional[PartMesh]] = []
    for slot, path in enumerate(shape.parts):
        if path is None:
            parts.append(None)
            continue
        location = manifest.resolve(path)
        mesh = read_obj(location, part_label=slot + 1, template=topology)
        if mesh.topology is not topology and not mesh.topology.same_connectivity(topology):
            raise ConnectivityMismatch(
                expected=int(topology.edges.shape[0]), actual=mesh.edges_count, path=str(location)
            )
        parts.append(mesh)
    return parts


def extract_features(
    manifest: DatasetManifest,
    kind: BaseFeatureKind = BaseFeatureKind.scale_sensitive,
    body_label: Optional[int] = None,
    split: Optional[str] = None,
    workers_num: int = 1,
) -> FeatureSet:
    """Base and structural features of every shape, optionally restricted to one split.

    Without an explicit ``body_label`` the body part is chosen over the whole manifest.
    """
    shapes = manifest.select(split)
    topology = template_topology(manifest.level)
    edges_count = int(topology.edges.shape[0])
    meshes = ordered_map(lambda shape: load_parts(manifest, shape), shapes, workers_num)
    if body_label is None:
        all_meshes = meshes if split is None else ordered_map(
            lambda shape: load_parts(manifest, shape), manifest.select(), workers_num
        )
        body_label = select_body_part(
            [part_volumes({slot + 1: part for slot, part in enumerate(parts)}) for parts in all_meshes]
        )
    body_index = body_label - 1

    def to_input(pair: Tuple[ShapeRecord, List[Optional[PartMesh]]]) -> ShapeInput:
        shape, parts = pair
        return shape_input_from_parts(parts, body_index, edges_count, kind, shape_id=shape.id, label=shape.label)

    inputs = ordered_map(to_input, list(zip(shapes, meshes)), workers_num)
    logger.info("Extracted features of %d shapes, body part slot %d", len(inputs), body_label)
    return FeatureSet(
        inputs=inputs,
        adjacency=topology.adjacency,
        edges_count=edges_count,
        parts=manifest.parts,
        body_label=body_label,
        kind=kind,
    )
