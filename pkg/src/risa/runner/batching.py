from collections import OrderedDict
from typing import Dict, List, Sequence

import numpy as np

# Shapes taken from one sub-class at a time while filling a batch
SHAPES_PER_CLASS = 2


def stratified_batches(labels: Sequence[str], batch_size: int, rng: np.random.Generator) -> List[np.ndarray]:
    """Split shape indices into batches mixing sub-classes.

    Every sub-class is shuffled, then batches are filled by taking two shapes from each sub-class in turn, so a
    batch holds pairs from several sub-classes whenever the data allows it. Every index appears exactly once.
    """
    queues: Dict[str, List[int]] = OrderedDict()
    for index, label in enumerate(labels):
        queues.setdefault(label, []).append(index)
    for label in queues:
        queues[label] = [queues[label][position] for position in rng.permutation(len(queues[label]))]
    order = list(queues)
    start = 0
    batches = []
    current: List[int] = []
    while any(queues.values()):
        label = order[start % len(order)]
        start += 1
        queue = queues[label]
        if not queue:
            continue
        take = min(SHAPES_PER_CLASS, len(queue), batch_size - len(current))
        current.extend(queue[:take])
        del queue[:take]
        if len(current) == batch_size:
            batches.append(np.array(current, dtype=np.int64))
            current = []
    if current:
        batches.append(np.array(current, dtype=np.int64))
    return batches
