from typing import Mapping, Optional

import attr
import numpy as np

from ..exceptions import ShapeMismatch
from ..mesh import EdgeAdjacency
from ..tensor import EdgeConvWeights, Tape, Tensor, batch_norm, edge_conv, fc, kl_gaussian, leaky_relu
from .config import ModelConfig, Mode
from .params import decoder_widths


@attr.s(slots=True)  # pragma: no mutate
class PartOutput:
    mu: Tensor = attr.ib()  # pragma: no mutate
    # None for the plain autoencoder
    logvar: Optional[Tensor] = attr.ib()  # pragma: no mutate
    # Zero rows for missing parts
    z: Tensor = attr.ib()  # pragma: no mutate
    reconstruction: Tensor = attr.ib()  # pragma: no mutate
    # One divergence per sample, zero for missing parts
    kl: Tensor = attr.ib()  # pragma: no mutate


def _conv_weights(bound: Mapping[str, Tensor], prefix: str) -> EdgeConvWeights:
    return EdgeConvWeights(
        w_edge=bound[f"{prefix}/w_edge"],
        w_first=bound[f"{prefix}/w_first"],
        w_second=bound[f"{prefix}/w_second"],
        bias=bound[f"{prefix}/bias"],
    )


def _conv_block(
    tape: Tape,
    bound: Mapping[str, Tensor],
    buffers: Mapping[str, np.ndarray],
    prefix: str,
    x: Tensor,
    adjacency: EdgeAdjacency,
    mode: Mode,
    mask: np.ndarray,
) -> Tensor:
    """Edge convolution followed by batch normalization and leaky-ReLU."""
    hidden = edge_conv(tape, x, adjacency, _conv_weights(bound, prefix))
    hidden = batch_norm(
        tape,
        hidden,
        bound[f"{prefix}/bn_gamma"],
        bound[f"{prefix}/bn_beta"],
        buffers[f"{prefix}/bn_mean"],
        buffers[f"{prefix}/bn_var"],
        training=mode.training,
        mask=mask,
    )
    return leaky_relu(tape, hidden)


def partvae_forward(
    tape: Tape,
    bound: Mapping[str, Tensor],
    buffers: Mapping[str, np.ndarray],
    config: ModelConfig,
    prefix: str,
    features: Tensor,
    adjacency: EdgeAdjacency,
    mask: np.ndarray,
    mode: Mode,
    rng: Optional[np.random.Generator] = None,
) -> PartOutput:
    """Encode and decode a batch of one part's base features (B×E×C).

    Latents are sampled only when training a variational model. Rows where ``mask`` is false are forced to zero
    latents and zero divergence.
    """
    batch = features.shape[0]
    if features.data.ndim != 3 or features.shape[1:] != (config.edges, config.in_channels):
        raise ShapeMismatch("partvae_forward", (features.shape, (batch, config.edges, config.in_channels)))
    present = np.asarray(mask, dtype=np.float64)
    column = present[:, None]
    hidden = features
    for layer in range(1, len(config.encoder_widths) + 1):
        hidden = _conv_block(tape, bound, buffers, f"{prefix}enc{layer}", hidden, adjacency, mode, present)
    flat = tape.reshape(hidden, (batch, config.edges * config.encoder_widths[-1]))
    mu = fc(tape, flat, bound[f"{prefix}mu/w"], bound[f"{prefix}mu/b"])
    logvar: Optional[Tensor] = None
    if config.variational:
        logvar = fc(tape, flat, bound[f"{prefix}logvar/w"], bound[f"{prefix}logvar/b"])
    if config.variational and mode.training:
        generator = rng if rng is not None else np.random.default_rng()
        noise = generator.standard_normal(mu.shape)
        z = tape.add(mu, tape.mul(tape.exp(tape.scale(logvar, 0.5)), noise))  # type: ignore
    else:
        z = mu
    z = tape.mul(z, column)
    if logvar is not None:
        kl = tape.mul(kl_gaussian(tape, mu, logvar, axis=-1), present)
    else:
        kl = tape.constant(np.zeros(batch))
    decoded = leaky_relu(tape, fc(tape, z, bound[f"{prefix}dec_fc/w"], bound[f"{prefix}dec_fc/b"]))
    hidden = tape.reshape(decoded, (batch, config.edges, config.encoder_widths[-1]))
    widths = decoder_widths(config)
    for layer in range(1, len(widths)):
        hidden = _conv_block(tape, bound, buffers, f"{prefix}dec{layer}", hidden, adjacency, mode, present)
    last = len(widths)
    reconstruction = edge_conv(tape, hidden, adjacency, _conv_weights(bound, f"{prefix}dec{last}"))
    return PartOutput(mu=mu, logvar=logvar, z=z, reconstruction=reconstruction, kl=kl)
