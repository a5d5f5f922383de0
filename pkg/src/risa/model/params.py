"""Parameter layout and initialization.

Names are slash-separated paths: ``part3/enc1/w_edge``, ``attention/key3``, ``global/enc2/w`` and so on.
"""
import logging
from typing import List, Union

import numpy as np

from ..constants import STRUCT_DIM
from ..tensor import ParameterSet
from ..tensor.params import glorot
from .config import ModelConfig

logger = logging.getLogger(__name__)


def part_prefix(config: ModelConfig, part: int) -> str:
    """Parameter prefix of the PartVAE serving part slot ``part`` (0-based)."""
    return "part/" if config.share_part_weights else f"part{part + 1}/"


def part_prefixes(config: ModelConfig) -> List[str]:
    return sorted({part_prefix(config, part) for part in range(config.parts)})


def decoder_widths(config: ModelConfig) -> List[int]:
    """Channel widths of the decoder edge convolutions, the encoder ones mirrored down to the input width."""
    return list(reversed(config.encoder_widths[:-1])) + [config.in_channels]


def _add_edge_conv(params: ParameterSet, rng: np.random.Generator, prefix: str, c_in: int, c_out: int) -> None:
    for name in ("w_edge", "w_first", "w_second"):
        params.add(f"{prefix}/{name}", glorot(rng, (c_in, c_out)))
    params.add(f"{prefix}/bias", np.zeros(c_out))


def _add_batch_norm(params: ParameterSet, prefix: str, channels: int) -> None:
    params.add(f"{prefix}/bn_gamma", np.ones(channels))
    params.add(f"{prefix}/bn_beta", np.zeros(channels))
    params.add_buffer(f"{prefix}/bn_mean", np.zeros(channels))
    params.add_buffer(f"{prefix}/bn_var", np.ones(channels))


def _add_fc(params: ParameterSet, rng: np.random.Generator, prefix: str, fan_in: int, fan_out: int) -> None:
    params.add(f"{prefix}/w", glorot(rng, (fan_in, fan_out)))
    params.add(f"{prefix}/b", np.zeros(fan_out))


def _add_part_vae(params: ParameterSet, rng: np.random.Generator, config: ModelConfig, prefix: str) -> None:
    channels = [config.in_channels, *config.encoder_widths]
    for layer, (c_in, c_out) in enumerate(zip(channels, channels[1:]), start=1):
        _add_edge_conv(params, rng, f"{prefix}enc{layer}", c_in, c_out)
        _add_batch_norm(params, f"{prefix}enc{layer}", c_out)
    flat = config.edges * config.encoder_widths[-1]
    _add_fc(params, rng, f"{prefix}mu", flat, config.latent_dim)
    if config.variational:
        _add_fc(params, rng, f"{prefix}logvar", flat, config.latent_dim)
    _add_fc(params, rng, f"{prefix}dec_fc", config.latent_dim, flat)
    widths = [config.encoder_widths[-1], *decoder_widths(config)]
    last = len(widths) - 1
    for layer, (c_in, c_out) in enumerate(zip(widths, widths[1:]), start=1):
        _add_edge_conv(params, rng, f"{prefix}dec{layer}", c_in, c_out)
        if layer < last:
            _add_batch_norm(params, f"{prefix}dec{layer}", c_out)


def _add_attention(params: ParameterSet, rng: np.random.Generator, config: ModelConfig) -> None:
    for part in range(config.parts):
        params.add(f"attention/key{part + 1}", glorot(rng, (config.latent_dim, config.attention_dim)))
        params.add(f"attention/query{part + 1}", glorot(rng, (config.latent_dim, config.attention_dim)))
    if config.use_structure:
        _add_fc(params, rng, "geo/fc1", config.parts * config.latent_dim, config.geo_hidden)
        _add_fc(params, rng, "geo/fc2", config.geo_hidden, 1)
        _add_fc(params, rng, "struct/fc1", config.parts * STRUCT_DIM, config.struct_hidden)
        _add_fc(params, rng, "struct/fc2", config.struct_hidden, 1)


def _add_global_vae(params: ParameterSet, rng: np.random.Generator, config: ModelConfig) -> None:
    sizes = [config.global_input_dim, *config.global_widths]
    for layer, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:]), start=1):
        _add_fc(params, rng, f"global/enc{layer}", fan_in, fan_out)
    _add_fc(params, rng, "global/mu", config.global_widths[-1], config.descriptor_dim)
    if config.variational:
        _add_fc(params, rng, "global/logvar", config.global_widths[-1], config.descriptor_dim)
    sizes = [config.descriptor_dim, *reversed(config.global_widths)]
    for layer, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:]), start=1):
        _add_fc(params, rng, f"global/dec{layer}", fan_in, fan_out)
    _add_fc(params, rng, "global/out", config.global_widths[0], config.global_input_dim)


def init_params(config: ModelConfig, seed: Union[None, int, np.random.SeedSequence] = None) -> ParameterSet:
    """Fresh parameters: Glorot-uniform weights, zero biases, identity batch-norm and feature scaling."""
    rng = np.random.default_rng(seed)
    params = ParameterSet()
    for prefix in part_prefixes(config):
        _add_part_vae(params, rng, config, prefix)
    _add_attention(params, rng, config)
    _add_global_vae(params, rng, config)
    params.add_buffer("scaler/mean", np.zeros(config.in_channels))
    params.add_buffer("scaler/std", np.ones(config.in_channels))
    logger.debug("Initialized %d parameters", params.count())
    return params
