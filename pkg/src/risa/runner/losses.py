from typing import Sequence

import numpy as np

from ..exceptions import NoValidTriplet, NonFinite
from ..model import ForwardOutput
from ..tensor import Tape, Tensor
from ..utils import pairwise_sq_distances
from .triplets import Triplet, as_indices


def _check_finite(value: Tensor, name: str) -> Tensor:
    if not np.all(np.isfinite(value.data)):
        raise NonFinite(f"{name} is not finite")
    return value


def part_vae_loss(tape: Tape, output: ForwardOutput, gamma: float) -> Tensor:
    """Batch mean of ``(1/P_i)·Σ_p mean((f_p − f'_p)²) + γ·Σ_p KL_p`` over the present parts of each shape."""
    mask = output.mask.astype(np.float64)
    present = np.maximum(mask.sum(axis=1), 1.0)
    total = None
    for idx, part in enumerate(output.parts):
        error = tape.mean(tape.square(tape.sub(part.reconstruction, output.targets[idx])), axis=(1, 2))
        term = tape.add(tape.mul(error, mask[:, idx] / present), tape.scale(part.kl, gamma))
        total = term if total is None else tape.add(total, term)
    return _check_finite(tape.mean(total), "Part VAE loss")  # type: ignore


def global_vae_loss(tape: Tape, output: ForwardOutput, gamma: float) -> Tensor:
    """Batch mean of ``mean((fv − fv')²) + γ·KL``; the global feature is a fixed target here."""
    target = tape.detach(output.fv)
    error = tape.mean(tape.square(tape.sub(output.global_.reconstruction, target)), axis=1)
    return _check_finite(tape.mean(tape.add(error, tape.scale(output.global_.kl, gamma))), "Global VAE loss")


def vae_loss(tape: Tape, output: ForwardOutput, gamma: float) -> Tensor:
    """Both VAE terms of a forward pass, unweighted."""
    return tape.add(part_vae_loss(tape, output, gamma), global_vae_loss(tape, output, gamma))


def triplet_loss(
    tape: Tape, vectors: Tensor, triplets: Sequence[Triplet], eta: float, reduction: str = "sum"
) -> Tensor:
    """Hinge ``[D̂(a,p) − D̂(a,n) + η]₊`` over triplets.

    ``D̂`` is the squared Euclidean distance divided by the largest pairwise distance in the batch, which is held
    constant during differentiation.
    """
    if not triplets:
        raise NoValidTriplet("No triplet can be formed from the batch labels")
    scale = float(pairwise_sq_distances(vectors.data).max())
    if scale <= 0:
        scale = 1.0
    indices = as_indices(triplets)
    anchors = tape.take(vectors, indices[:, 0], axis=0)
    positives = tape.take(vectors, indices[:, 1], axis=0)
    negatives = tape.take(vectors, indices[:, 2], axis=0)
    positive_distance = tape.sum(tape.square(tape.sub(anchors, positives)), axis=1)
    negative_distance = tape.sum(tape.square(tape.sub(anchors, negatives)), axis=1)
    margins = tape.add(tape.scale(tape.sub(positive_distance, negative_distance), 1.0 / scale), eta)
    hinge = tape.relu(margins)
    if reduction == "mean":
        return tape.mean(hinge)
    return tape.sum(hinge)

