import logging
import pathlib
from typing import Optional, Union

import attr
import numpy as np

from ..mesh import (
    RigidTransform,
    apply_rigid,
    matrix_to_quaternion,
    quaternion_to_matrix,
    random_quaternion,
    read_obj,
    template_topology,
    write_obj,
)
from .manifest import DatasetManifest

logger = logging.getLogger(__name__)


def perturb_rotations(
    manifest: DatasetManifest, seed: int, out_dir: Optional[Union[str, pathlib.Path]] = None
) -> DatasetManifest:
    """Rotate every shape by its own uniform SO(3) rotation, shared by all of its parts.

    Rotated meshes go to ``out_dir`` (in place by default) and the manifest records the accumulated rotation.
    """
    out = pathlib.Path(out_dir) if out_dir is not None else manifest.root
    if out is None:
        raise ValueError("Manifest has no directory, pass `out_dir`")
    out.mkdir(parents=True, exist_ok=True)
    topology = template_topology(manifest.level)
    seeds = np.random.SeedSequence(seed).spawn(len(manifest.shapes))
    shapes = []
    for shape, child in zip(manifest.shapes, seeds):
        rotation = quaternion_to_matrix(random_quaternion(np.random.default_rng(child)))
        transform = RigidTransform(rotation=rotation)
        for slot, path in enumerate(shape.parts):
            if path is None:
                continue
            mesh = read_obj(manifest.resolve(path), part_label=slot + 1, template=topology)
            write_obj(out / path, apply_rigid(mesh, transform))
        accumulated = matrix_to_quaternion(rotation @ quaternion_to_matrix(np.asarray(shape.rotation)))
        shapes.append(attr.evolve(shape, rotation=accumulated.tolist()))
    logger.info("Rotated %d shapes", len(shapes))
    perturbed = manifest.replace_shapes(shapes, root=out)
    perturbed.save()
    return perturbed
