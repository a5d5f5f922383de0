"""Retrieval quality of a descriptor index: NN, FT, ST, NDCG and mAP, micro- and macro-averaged."""
from collections import OrderedDict
from typing import Any, Dict, List, Optional, Sequence

import attr
import numpy as np

from ..exceptions import EmptyQuerySet
from ..threadpool import ordered_map
from .index import DescriptorIndex, query

METRIC_NAMES = ("NN", "FT", "ST", "NDCG", "mAP")


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class QueryMetrics:
    shape_id: str = attr.ib()  # pragma: no mutate
    label: str = attr.ib()  # pragma: no mutate
    nn: float = attr.ib()  # pragma: no mutate
    first_tier: float = attr.ib()  # pragma: no mutate
    second_tier: float = attr.ib()  # pragma: no mutate
    ndcg: float = attr.ib()  # pragma: no mutate
    average_precision: float = attr.ib()  # pragma: no mutate

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(METRIC_NAMES, (self.nn, self.first_tier, self.second_tier, self.ndcg, self.average_precision)))


def ranking_metrics(shape_id: str, label: str, ranked_labels: Sequence[str]) -> Optional[QueryMetrics]:
    """Metrics of one ranking, ``None`` when nothing in it is relevant to the query.

    With ``K`` relevant items in the ranking, the first tier is the recall within the top ``K`` and the second
    tier the recall within the top ``2K``.
    """
    relevant = np.array([item == label for item in ranked_labels], dtype=bool)
    total = int(relevant.sum())
    if total == 0:
        return None
    ranks = np.flatnonzero(relevant) + 1
    hits = np.cumsum(relevant)
    discounts = 1.0 / np.log2(np.arange(2, len(relevant) + 2))
    ideal = discounts[:total].sum()
    return QueryMetrics(
        shape_id=shape_id,
        label=label,
        nn=float(relevant[0]),
        first_tier=float(hits[total - 1]) / total,
        second_tier=float(hits[min(2 * total, len(relevant)) - 1]) / total,
        ndcg=float(discounts[relevant].sum() / ideal),
        average_precision=float(np.mean(np.arange(1, total + 1) / ranks)),
    )


def _mean_metrics(values: Sequence[QueryMetrics]) -> Dict[str, float]:
    rows = np.array([[value for value in item.as_dict().values()] for item in values])
    return dict(zip(METRIC_NAMES, (float(value) for value in rows.mean(axis=0))))


@attr.s(slots=True)  # pragma: no mutate
class EvaluationReport:
    micro: Dict[str, float] = attr.ib()  # pragma: no mutate
    macro: Dict[str, float] = attr.ib()  # pragma: no mutate
    skipped_queries: int = attr.ib()  # pragma: no mutate
    queries: List[QueryMetrics] = attr.ib(factory=list)  # pragma: no mutate

    def as_dict(self) -> Dict[str, Any]:
        return {"micro": dict(self.micro), "macro": dict(self.macro), "skipped_queries": self.skipped_queries}


def aggregate(values: Sequence[QueryMetrics], skipped: int = 0) -> EvaluationReport:
    """Micro: every query counts once. Macro: the mean of per-sub-class means."""
    if not values:
        raise EmptyQuerySet(f"No query could be evaluated ({skipped} skipped)")
    groups: Dict[str, List[QueryMetrics]] = OrderedDict()
    for item in values:
        groups.setdefault(item.label, []).append(item)
    per_class = [_mean_metrics(members) for members in groups.values()]
    macro = {name: float(np.mean([means[name] for means in per_class])) for name in METRIC_NAMES}
    return EvaluationReport(micro=_mean_metrics(values), macro=macro, skipped_queries=skipped, queries=list(values))


def evaluate(index: DescriptorIndex, queries: DescriptorIndex, workers_num: int = 1) -> EvaluationReport:
    """Rank the index for every query and average the metrics.

    A query with no other member of its sub-class in the index is skipped and counted.
    """
    if len(queries) == 0:
        raise EmptyQuerySet("No queries given")

    def evaluate_one(position: int) -> Optional[QueryMetrics]:
        shape_id = queries.ids[position]
        ranked = query(index, queries.descriptors[position], shape_id)
        return ranking_metrics(shape_id, queries.labels[position], ranked.labels)

    results = ordered_map(evaluate_one, list(range(len(queries))), workers_num)
    values = [item for item in results if item is not None]
    return aggregate(values, skipped=len(results) - len(values))


def expected_random_map(labels: Sequence[str]) -> float:
    """Expected micro mAP of a uniformly random ranking of a pool, every member querying the rest."""
    counts: Dict[str, int] = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    size = len(labels)
    values = []
    for label in labels:
        relevant = counts[label] - 1
        if relevant == 0:
            continue
        others = size - 1
        harmonic = sum(1.0 / rank for rank in range(1, others + 1))
        # E[AP] of a random permutation of `others` items holding `relevant` relevant ones
        if others == 1:
            values.append(1.0)
        else:
            values.append((harmonic + (relevant - 1) * (others - harmonic) / (others - 1)) / others)
    if not values:
        raise EmptyQuerySet("No query has a relevant item")
    return float(np.mean(values))
