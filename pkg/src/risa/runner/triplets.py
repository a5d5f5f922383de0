from typing import List, Sequence

import attr
import numpy as np


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class Triplet:
    anchor: int = attr.ib()  # pragma: no mutate
    positive: int = attr.ib()  # pragma: no mutate
    negative: int = attr.ib()  # pragma: no mutate


def mine_triplets(labels: Sequence[str]) -> List[Triplet]:
    """Every in-batch (anchor, positive, negative) combination, ordered by anchor, positive, then negative."""
    return [
        Triplet(anchor, positive, negative)
        for anchor, anchor_label in enumerate(labels)
        for positive, positive_label in enumerate(labels)
        if positive != anchor and positive_label == anchor_label
        for negative, negative_label in enumerate(labels)
        if negative_label != anchor_label
    ]


def as_indices(triplets: Sequence[Triplet]) -> np.ndarray:
    return np.array([[item.anchor, item.positive, item.negative] for item in triplets], dtype=np.int64).reshape(-1, 3)
