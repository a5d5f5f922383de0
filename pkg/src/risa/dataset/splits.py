from collections import OrderedDict
from typing import Dict, List, Tuple

import attr
import numpy as np

from ..exceptions import TooFewShapes
from .manifest import DatasetManifest

DEFAULT_RATIO = (4, 1)
MIN_SHAPES_TO_SPLIT = 5


def split(manifest: DatasetManifest, ratio: Tuple[int, int] = DEFAULT_RATIO, seed: int = 0) -> DatasetManifest:
    """Stratified train / test assignment, ``ratio`` being train:test within every sub-class.

    A sub-class of ``n`` shapes gets ``max(1, round(n·test / (train + test)))`` test shapes, rounding halves up.
    """
    train_weight, test_weight = ratio
    groups: Dict[str, List[int]] = OrderedDict()
    for index, shape in enumerate(manifest.shapes):
        groups.setdefault(shape.label, []).append(index)
    for label, members in groups.items():
        if len(members) < MIN_SHAPES_TO_SPLIT:
            raise TooFewShapes(
                f"Sub-class `{label}` has {len(members)} shapes, at least {MIN_SHAPES_TO_SPLIT} are needed to split"
            )
    rng = np.random.default_rng(seed)
    test = set()
    for members in groups.values():
        test_count = max(1, int(np.floor(len(members) * test_weight / (train_weight + test_weight) + 0.5)))
        order = rng.permutation(len(members))
        test.update(members[position] for position in order[:test_count])
    shapes = [
        attr.evolve(shape, split="test" if index in test else "train") for index, shape in enumerate(manifest.shapes)
    ]
    return manifest.replace_shapes(shapes)
