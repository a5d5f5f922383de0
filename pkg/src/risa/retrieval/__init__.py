from .curves import RECALL_LEVELS, interpolated_precision, pr_curve, write_pr_curve
from .descriptors import read_descriptors, write_descriptors
from .index import DescriptorIndex, RankedList, query
from .metrics import (
    METRIC_NAMES,
    EvaluationReport,
    QueryMetrics,
    aggregate,
    evaluate,
    expected_random_map,
    ranking_metrics,
)
from .tier import Tier, render, tier_image, tier_matrix, write_ppm
