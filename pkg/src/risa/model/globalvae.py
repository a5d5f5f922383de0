from typing import Mapping, Optional

import attr
import numpy as np

from ..exceptions import ShapeMismatch
from ..tensor import Tape, Tensor, fc, kl_gaussian, leaky_relu
from .config import ModelConfig, Mode


@attr.s(slots=True)  # pragma: no mutate
class GlobalOutput:
    # Latent mean, the shape descriptor
    mu: Tensor = attr.ib()  # pragma: no mutate
    logvar: Optional[Tensor] = attr.ib()  # pragma: no mutate
    reconstruction: Tensor = attr.ib()  # pragma: no mutate
    kl: Tensor = attr.ib()  # pragma: no mutate


def global_vae_forward(
    tape: Tape,
    bound: Mapping[str, Tensor],
    config: ModelConfig,
    features: Tensor,
    mode: Mode,
    rng: Optional[np.random.Generator] = None,
) -> GlobalOutput:
    """Fully-connected VAE over the global feature (B×D), with a linear reconstruction layer."""
    if features.data.ndim != 2 or features.shape[1] != config.global_input_dim:
        raise ShapeMismatch("global_vae_forward", (features.shape, (config.global_input_dim,)))
    batch = features.shape[0]
    hidden = features
    for layer in range(1, len(config.global_widths) + 1):
        hidden = leaky_relu(tape, fc(tape, hidden, bound[f"global/enc{layer}/w"], bound[f"global/enc{layer}/b"]))
    mu = fc(tape, hidden, bound["global/mu/w"], bound["global/mu/b"])
    logvar: Optional[Tensor] = None
    if config.variational:
        logvar = fc(tape, hidden, bound["global/logvar/w"], bound["global/logvar/b"])
        kl = kl_gaussian(tape, mu, logvar, axis=-1)
    else:
        kl = tape.constant(np.zeros(batch))
    if logvar is not None and mode.training:
        generator = rng if rng is not None else np.random.default_rng()
        z = tape.add(mu, tape.mul(tape.exp(tape.scale(logvar, 0.5)), generator.standard_normal(mu.shape)))
    else:
        z = mu
    hidden = z
    for layer in range(1, len(config.global_widths) + 1):
        hidden = leaky_relu(tape, fc(tape, hidden, bound[f"global/dec{layer}/w"], bound[f"global/dec{layer}/b"]))
    reconstruction = fc(tape, hidden, bound["global/out/w"], bound["global/out/b"])
    return GlobalOutput(mu=mu, logvar=logvar, reconstruction=reconstruction, kl=kl)
