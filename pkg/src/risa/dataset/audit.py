import logging
from typing import Sequence, Tuple

import numpy as np

from ..exceptions import InseparableFamily
from ..model import ShapeInput
from ..utils import pairwise_sq_distances

logger = logging.getLogger(__name__)


def class_separation(inputs: Sequence[ShapeInput]) -> Tuple[float, float]:
    """Mean Euclidean base-feature distance within sub-classes and between them."""
    vectors = np.stack([item.base.reshape(-1) for item in inputs])
    distances = np.sqrt(np.maximum(pairwise_sq_distances(vectors), 0.0))
    labels = np.array([item.label for item in inputs], dtype=object)
    same = labels[:, None] == labels[None, :]
    off_diagonal = ~np.eye(len(inputs), dtype=bool)
    intra = distances[same & off_diagonal]
    inter = distances[~same]
    if intra.size == 0 or inter.size == 0:
        raise InseparableFamily("Separation needs at least two sub-classes with two shapes each")
    return float(intra.mean()), float(inter.mean())


def audit_separability(inputs: Sequence[ShapeInput]) -> Tuple[float, float]:
    intra, inter = class_separation(inputs)
    logger.info("Mean base-feature distance: %.6g within sub-classes, %.6g between", intra, inter)
    if not intra < inter:
        raise InseparableFamily(
            f"Shapes of one sub-class are not closer than shapes of different ones ({intra:.6g} >= {inter:.6g})"
        )
    return intra, inter
