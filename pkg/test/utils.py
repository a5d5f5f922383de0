import os
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from risa.dataset import FamilySpec, PartSpec, SubclassSpec
from risa.mesh import PartMesh, build_mesh

HERE = os.path.dirname(os.path.abspath(__file__))

TETRAHEDRON_VERTICES = ((1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0))
TETRAHEDRON_FACES = ((0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2))

# Two sub-classes at template level 0, told apart by leg taper. Vertex noise breaks the box symmetry, so principal
# axes have well-defined signs
TOY_FAMILY = FamilySpec(
    name="toy",
    parts=[
        PartSpec(name="body", center=(0.0, 0.0, 1.0), size=(1.0, 0.8, 0.2)),
        PartSpec(name="leg", center=(0.0, 0.0, 0.45), size=(0.2, 0.2, 0.9), profiled=True),
    ],
    subclasses=[SubclassSpec(label="plain"), SubclassSpec(label="tapered", taper=(0.5, 0.6))],
    level=0,
    jitter=0.05,
    noise=0.02,
)

TOY_FAMILY_DOCUMENT = """
name: toy
level: 0
jitter: 0.05
noise: 0.02
parts:
  - name: body
    center: [0.0, 0.0, 1.0]
    size: [1.0, 0.8, 0.2]
  - name: leg
    center: [0.0, 0.0, 0.45]
    size: [0.2, 0.2, 0.9]
    profiled: true
subclasses:
  - label: plain
  - label: tapered
    taper: [0.5, 0.6]
"""

# Widths small enough for tests to train in seconds
SMALL_MODEL = {
    "latent_dim": 4,
    "descriptor_dim": 4,
    "attention_dim": 4,
    "encoder_widths": [4],
    "global_widths": [8],
    "geo_hidden": 4,
    "struct_hidden": 4,
}


def tetrahedron() -> PartMesh:
    mesh, _ = build_mesh(TETRAHEDRON_VERTICES, TETRAHEDRON_FACES)
    return mesh


def numeric_gradient(function: Callable[[np.ndarray], float], value: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central finite differences of a scalar function."""
    value = np.array(value, dtype=np.float64)
    gradient = np.zeros_like(value)
    for index in np.ndindex(*value.shape):
        original = value[index]
        value[index] = original + h
        upper = function(value)
        value[index] = original - h
        lower = function(value)
        value[index] = original
        gradient[index] = (upper - lower) / (2 * h)
    return gradient


def relative_error(actual: np.ndarray, expected: np.ndarray, floor: float = 1e-8) -> float:
    scale = max(float(np.max(np.abs(expected))), floor)
    return float(np.max(np.abs(np.asarray(actual) - np.asarray(expected)))) / scale


def brute_force_metrics(label: str, ranked_labels: Sequence[str]) -> Optional[Tuple[float, float, float, float, float]]:
    """NN, FT, ST, NDCG and AP computed by plain loops."""
    relevant = [item == label for item in ranked_labels]
    k = sum(relevant)
    if k == 0:
        return None
    nn = 1.0 if relevant[0] else 0.0
    first_tier = sum(relevant[:k]) / k
    second_tier = sum(relevant[: 2 * k]) / k
    dcg = 0.0
    for rank, is_relevant in enumerate(relevant, start=1):
        if is_relevant:
            dcg += 1.0 / np.log2(rank + 1)
    ideal = sum(1.0 / np.log2(rank + 1) for rank in range(1, k + 1))
    precisions: List[float] = []
    hits = 0
    for rank, is_relevant in enumerate(relevant, start=1):
        if is_relevant:
            hits += 1
            precisions.append(hits / rank)
    return nn, first_tier, second_tier, dcg / ideal, sum(precisions) / k
