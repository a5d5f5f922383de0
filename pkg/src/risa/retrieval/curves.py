import csv
import pathlib
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import EmptyQuerySet
from ..threadpool import ordered_map
from .index import DescriptorIndex, query

RECALL_LEVELS = np.linspace(0.0, 1.0, 101)


def interpolated_precision(ranked_labels: Sequence[str], label: str) -> Optional[np.ndarray]:
    """Precision at every recall level, taken as the best precision at that recall or above."""
    relevant = np.array([item == label for item in ranked_labels], dtype=bool)
    total = int(relevant.sum())
    if total == 0:
        return None
    hits = np.cumsum(relevant)
    precision = hits / np.arange(1, len(relevant) + 1)
    recall = hits / total
    # Running maximum from the end of the list
    best = np.maximum.accumulate(precision[::-1])[::-1]
    positions = np.searchsorted(recall, RECALL_LEVELS - 1e-12, side="left")
    return best[np.minimum(positions, len(best) - 1)]


def pr_curve(index: DescriptorIndex, queries: DescriptorIndex, workers_num: int = 1) -> List[Tuple[float, float]]:
    """Mean interpolated precision of all queries at 101 recall levels."""

    def curve_of(position: int) -> Optional[np.ndarray]:
        ranked = query(index, queries.descriptors[position], queries.ids[position])
        return interpolated_precision(ranked.labels, queries.labels[position])

    curves = [curve for curve in ordered_map(curve_of, list(range(len(queries))), workers_num) if curve is not None]
    if not curves:
        raise EmptyQuerySet("No query could be evaluated")
    mean = np.mean(np.stack(curves), axis=0)
    return [(float(recall), float(precision)) for recall, precision in zip(RECALL_LEVELS, mean)]


def write_pr_curve(path: Union[str, pathlib.Path], points: Sequence[Tuple[float, float]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fd:
        writer = csv.writer(fd, lineterminator="\n")
        writer.writerow(("recall", "precision"))
        for recall, precision in points:
            writer.writerow((f"{recall:.2f}", f"{precision:.17g}"))
