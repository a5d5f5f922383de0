"""Layers built from tape operations.

Inputs are row-major: a batch of edge features has shape (batch, edges, channels), dense inputs (batch, features).
"""
from typing import Optional

import attr
import numpy as np

from ..constants import BATCH_NORM_EPS, BATCH_NORM_MOMENTUM, LEAKY_SLOPE
from ..exceptions import NonFinite, ShapeMismatch
from ..mesh import EdgeAdjacency
from .core import Tape, Tensor


@attr.s(slots=True)  # pragma: no mutate
class EdgeConvWeights:
    w_edge: Tensor = attr.ib()  # pragma: no mutate
    w_first: Tensor = attr.ib()  # pragma: no mutate
    w_second: Tensor = attr.ib()  # pragma: no mutate
    bias: Tensor = attr.ib()  # pragma: no mutate


def edge_conv(tape: Tape, x: Tensor, adjacency: EdgeAdjacency, weights: EdgeConvWeights) -> Tensor:
    """y_i = x_i·W_e + mean(x over N1(i))·W_n1 + mean(x over N2(i))·W_n2 + b for every edge i.

    ``x`` is either E×C_in or batched B×E×C_in; weights are C_in×C_out matrices.
    """
    edges_axis = x.data.ndim - 2
    if x.data.ndim not in (2, 3) or x.shape[edges_axis] != adjacency.edges_count:
        raise ShapeMismatch("edge_conv", (x.shape, (adjacency.edges_count,)))
    channels = x.shape[-1]
    for weight in (weights.w_edge, weights.w_first, weights.w_second):
        if weight.shape[0] != channels or weight.shape != weights.w_edge.shape:
            raise ShapeMismatch("edge_conv", (x.shape, weight.shape))
    if weights.bias.shape != (weights.w_edge.shape[1],):
        raise ShapeMismatch("edge_conv", (weights.w_edge.shape, weights.bias.shape))
    first = tape.scale(
        tape.add(
            tape.take(x, adjacency.n1[:, 0], axis=edges_axis), tape.take(x, adjacency.n1[:, 1], axis=edges_axis)
        ),
        0.5,
    )
    second = tape.scale(
        tape.add(
            tape.take(x, adjacency.n2[:, 0], axis=edges_axis), tape.take(x, adjacency.n2[:, 1], axis=edges_axis)
        ),
        0.5,
    )
    output = tape.add(tape.matmul(x, weights.w_edge), tape.matmul(first, weights.w_first))
    output = tape.add(output, tape.matmul(second, weights.w_second))
    return tape.add(output, weights.bias)


def fc(tape: Tape, x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """x·W + b with W of shape (in, out)."""
    if weight.data.ndim != 2 or x.shape[-1] != weight.shape[0] or bias.shape != (weight.shape[1],):
        raise ShapeMismatch("fc", (x.shape, weight.shape, bias.shape))
    return tape.add(tape.matmul(x, weight), bias)


def leaky_relu(tape: Tape, x: Tensor, slope: float = LEAKY_SLOPE) -> Tensor:
    return tape.leaky_relu(x, slope)


def _sample_mask(x: Tensor, mask: Optional[np.ndarray]) -> np.ndarray:
    batch = x.shape[0]
    if mask is None:
        mask = np.ones(batch)
    mask = np.asarray(mask, dtype=np.float64)
    if mask.shape != (batch,):
        raise ShapeMismatch("batch_norm", (x.shape, mask.shape))
    return mask.reshape((batch,) + (1,) * (x.data.ndim - 1))


def batch_norm(
    tape: Tape,
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    training: bool,
    mask: Optional[np.ndarray] = None,
    momentum: float = BATCH_NORM_MOMENTUM,
    eps: float = BATCH_NORM_EPS,
) -> Tensor:
    """Per-channel normalization over every axis but the last one.

    In training mode the statistics come from the samples selected by ``mask`` (all samples by default), the
    biased variance normalizes and the unbiased one updates the running variance in place. Evaluation mode uses
    the running statistics.
    """
    channels = x.shape[-1]
    if gamma.shape != (channels,) or beta.shape != (channels,) or running_mean.shape != (channels,):
        raise ShapeMismatch("batch_norm", (x.shape, gamma.shape, beta.shape, running_mean.shape))
    if not training:
        scale = 1.0 / np.sqrt(running_var + eps)
        normalized = tape.mul(tape.sub(x, running_mean), scale)
        return tape.add(tape.mul(normalized, gamma), beta)
    weights = _sample_mask(x, mask)
    axes = tuple(range(x.data.ndim - 1))
    count = float(weights.sum()) * (x.data.size // (x.shape[0] * channels))
    if count == 0:
        # Nothing to normalize with, every sample of the batch is masked out
        return tape.add(tape.mul(x, gamma), beta)
    mean = tape.scale(tape.sum(tape.mul(x, weights), axis=axes), 1.0 / count)
    centered = tape.sub(x, mean)
    variance = tape.scale(tape.sum(tape.mul(tape.square(centered), weights), axis=axes), 1.0 / count)
    normalized = tape.mul(centered, tape.power(tape.add(variance, eps), -0.5))
    if count >= 2:
        unbiased = variance.data * count / (count - 1)
        running_mean *= 1.0 - momentum
        running_mean += momentum * mean.data
        running_var *= 1.0 - momentum
        running_var += momentum * unbiased
    return tape.add(tape.mul(normalized, gamma), beta)


def softmax(tape: Tape, x: Tensor, mask: Optional[np.ndarray] = None, axis: int = -1) -> Tensor:
    """Softmax along ``axis``, restricted to entries where ``mask`` is set; masked entries get exactly 0."""
    if mask is None:
        mask = np.ones(x.shape)
    mask = np.broadcast_to(np.asarray(mask, dtype=np.float64), x.shape)
    if np.any(mask.sum(axis=axis) == 0):
        raise ShapeMismatch("softmax", (x.shape, mask.shape))
    # Max over selected entries is a constant shift, it does not change the result
    shift = np.max(np.where(mask > 0, x.data, -np.inf), axis=axis, keepdims=True)
    shifted = tape.sub(x, np.where(mask > 0, shift, x.data))
    exponents = tape.mul(tape.exp(shifted), mask)
    return tape.div(exponents, tape.sum(exponents, axis=axis, keepdims=True))


def kl_gaussian(tape: Tape, mu: Tensor, logvar: Tensor, axis: Optional[int] = None) -> Tensor:
    """½·Σ(μ² + σ² − 1 − log σ²) for a diagonal Gaussian against the standard normal.

    Sums everything by default, or along ``axis`` to get one divergence per sample.
    """
    if mu.shape != logvar.shape:
        raise ShapeMismatch("kl_gaussian", (mu.shape, logvar.shape))
    terms = tape.sub(tape.add(tape.square(mu), tape.exp(logvar)), tape.add(logvar, 1.0))
    result = tape.scale(tape.sum(terms, axis=axis), 0.5)
    if not np.all(np.isfinite(result.data)):
        raise NonFinite("KL divergence is not finite")
    return result


def kl_gaussian_value(mu: np.ndarray, logvar: np.ndarray) -> float:
    return float(0.5 * np.sum(mu ** 2 + np.exp(logvar) - 1.0 - logvar))
