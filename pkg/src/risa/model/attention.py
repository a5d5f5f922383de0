from typing import Mapping, Sequence, Tuple

import numpy as np

from ..exceptions import AllPartsMissing, ShapeMismatch
from ..tensor import Tape, Tensor, fc, leaky_relu, softmax


def part_geo_attention(
    tape: Tape, bound: Mapping[str, Tensor], latents: Sequence[Tensor], mask: np.ndarray
) -> Tensor:
    """Weights of the part latents (B×P), a softmax over present parts of unscaled key/query dot products.

    Keys are per-part projections of each latent, the query is the sum of per-part projections over present parts.
    Missing parts get weight 0.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2 or mask.shape[1] != len(latents):
        raise ShapeMismatch("part_geo_attention", (mask.shape, (len(latents),)))
    if not np.all(mask.any(axis=1)):
        raise AllPartsMissing("Part attention needs at least one present part per shape")
    presence = mask.astype(np.float64)
    keys = []
    query = None
    for part, latent in enumerate(latents):
        keys.append(tape.matmul(latent, bound[f"attention/key{part + 1}"]))
        projected = tape.mul(tape.matmul(latent, bound[f"attention/query{part + 1}"]), presence[:, part : part + 1])
        query = projected if query is None else tape.add(query, projected)
    scores = tape.stack([tape.sum(tape.mul(key, query), axis=-1) for key in keys], axis=1)
    return softmax(tape, scores, mask=presence)


def _score(tape: Tape, bound: Mapping[str, Tensor], prefix: str, value: Tensor) -> Tensor:
    hidden = leaky_relu(tape, fc(tape, value, bound[f"{prefix}/fc1/w"], bound[f"{prefix}/fc1/b"]))
    return fc(tape, hidden, bound[f"{prefix}/fc2/w"], bound[f"{prefix}/fc2/b"])


def geo_struct_attention(
    tape: Tape, bound: Mapping[str, Tensor], geometry: Tensor, structure: Tensor
) -> Tuple[Tensor, Tensor]:
    """Geometry and structure weights (w^g, w^s), each B×1, from two small scoring networks."""
    scores = tape.concat([_score(tape, bound, "geo", geometry), _score(tape, bound, "struct", structure)], axis=-1)
    weights = softmax(tape, scores)
    return tape.take(weights, np.array([0]), axis=-1), tape.take(weights, np.array([1]), axis=-1)
