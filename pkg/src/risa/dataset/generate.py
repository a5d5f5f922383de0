import logging
import pathlib
from typing import List, Mapping, Optional, Union

import numpy as np

from ..exceptions import TooFewShapes
from ..mesh import write_obj
from .families import FamilySpec, sample_shape
from .manifest import DatasetManifest, ShapeRecord

logger = logging.getLogger(__name__)

MIN_SHAPES_PER_SUBCLASS = 2


def shape_id(label: str, index: int) -> str:
    return f"{label}_{index:03d}"


def part_file_name(shape: str, part: int) -> str:
    """``<shape>_<part>.obj`` with 1-based part numbers."""
    return f"{shape}_{part + 1}.obj"


def generate(
    spec: FamilySpec, counts: Union[int, Mapping[str, int]], seed: int, out_dir: Union[str, pathlib.Path]
) -> DatasetManifest:
    """Write a synthetic dataset and its manifest into ``out_dir``.

    Every shape draws from its own child seed, so a shape does not depend on the ones generated before it.
    """
    if isinstance(counts, int):
        counts = {label: counts for label in spec.labels}
    for label in spec.labels:
        if counts.get(label, 0) < MIN_SHAPES_PER_SUBCLASS:
            raise TooFewShapes(
                f"Sub-class `{label}` needs at least {MIN_SHAPES_PER_SUBCLASS} shapes, got {counts.get(label, 0)}"
            )
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    total = sum(counts[label] for label in spec.labels)
    seeds = iter(np.random.SeedSequence(seed).spawn(total))
    shapes: List[ShapeRecord] = []
    for subclass in spec.subclasses:
        for index in range(counts[subclass.label]):
            rng = np.random.default_rng(next(seeds))
            identifier = shape_id(subclass.label, index)
            paths: List[Optional[str]] = []
            for part_index, part in enumerate(sample_shape(spec, subclass, rng)):
                if part is None:
                    paths.append(None)
                    continue
                name = part_file_name(identifier, part_index)
                write_obj(out_dir / name, part)
                paths.append(name)
            shapes.append(ShapeRecord(id=identifier, label=subclass.label, parts=paths))
        logger.info("Generated %d shapes of `%s`", counts[subclass.label], subclass.label)
    manifest = DatasetManifest(
        class_name=spec.name, parts=len(spec.parts), level=spec.level, shapes=shapes, root=out_dir
    )
    manifest.save()
    return manifest
