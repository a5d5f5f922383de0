"""The full forward pass: PartVAE set, both attentions and the GlobalVAE."""
from typing import List, Optional, Union

import attr
import numpy as np

from ..constants import STRUCT_DIM
from ..exceptions import ShapeMismatch
from ..mesh import EdgeAdjacency
from ..tensor import ParameterSet, Tape, Tensor
from .attention import geo_struct_attention, part_geo_attention
from .config import ModelConfig, Mode
from .globalvae import GlobalOutput, global_vae_forward
from .inputs import ShapeBatch, ShapeInput
from .params import part_prefix
from .partvae import PartOutput, partvae_forward


@attr.s(slots=True)  # pragma: no mutate
class ForwardOutput:
    parts: List[PartOutput] = attr.ib()  # pragma: no mutate
    # Standardized base features the PartVAEs reconstruct, P×B×E×C
    targets: np.ndarray = attr.ib()  # pragma: no mutate
    mask: np.ndarray = attr.ib()  # pragma: no mutate
    # B×P part attention
    alpha: Tensor = attr.ib()  # pragma: no mutate
    # B×1 each
    w_geometry: Tensor = attr.ib()  # pragma: no mutate
    w_structure: Tensor = attr.ib()  # pragma: no mutate
    # Attention-weighted part latents, B×(P·d_z)
    gv: Tensor = attr.ib()  # pragma: no mutate
    fv: Tensor = attr.ib()  # pragma: no mutate
    global_: GlobalOutput = attr.ib()  # pragma: no mutate

    @property
    def descriptor(self) -> Tensor:
        return self.global_.mu

    @property
    def latents(self) -> List[Tensor]:
        return [part.z for part in self.parts]


def standardize(params: ParameterSet, base: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Scale base features (P×B×E×C) channel-wise with the stored statistics, keeping missing parts at zero."""
    mean = params.buffers["scaler/mean"]
    std = params.buffers["scaler/std"]
    present = np.asarray(mask, dtype=np.float64).T[:, :, None, None]
    return (base - mean) / std * present


def model_forward(
    inputs: Union[ShapeBatch, ShapeInput],
    params: ParameterSet,
    config: ModelConfig,
    adjacency: EdgeAdjacency,
    mode: Mode = Mode.eval,
    tape: Optional[Tape] = None,
    rng: Optional[np.random.Generator] = None,
) -> ForwardOutput:
    """Run the network on a batch of shapes.

    The global feature of a part is ``[w^g·α_p·z_p, w^s·sv_p]``. Without structure it is only the attention-weighted
    latents, and the Geo-Struct attention is skipped.
    """
    batch = ShapeBatch.from_inputs([inputs]) if isinstance(inputs, ShapeInput) else inputs
    if batch.base.shape[0] != config.parts or batch.base.shape[2:] != (config.edges, config.in_channels):
        raise ShapeMismatch("model_forward", (batch.base.shape, (config.parts, config.edges, config.in_channels)))
    tape = tape if tape is not None else Tape()
    bound = params.bind(tape)
    mask = np.asarray(batch.mask, dtype=bool)
    targets = standardize(params, batch.base, mask)
    parts = [
        partvae_forward(
            tape,
            bound,
            params.buffers,
            config,
            part_prefix(config, part),
            tape.constant(targets[part]),
            adjacency,
            mask[:, part],
            mode,
            rng,
        )
        for part in range(config.parts)
    ]
    alpha = part_geo_attention(tape, bound, [part.z for part in parts], mask)
    weighted = [tape.mul(part.z, tape.take(alpha, np.array([idx]), axis=1)) for idx, part in enumerate(parts)]
    gv = tape.concat(weighted, axis=1)
    if config.use_structure:
        structure = tape.constant(batch.structure.reshape(batch.size, config.parts * STRUCT_DIM))
        w_geometry, w_structure = geo_struct_attention(tape, bound, gv, structure)
        blocks = []
        for idx, latent in enumerate(weighted):
            blocks.append(tape.mul(latent, w_geometry))
            blocks.append(tape.mul(batch.structure[:, idx, :], w_structure))
        fv = tape.concat(blocks, axis=1)
    else:
        w_geometry = tape.constant(np.ones((batch.size, 1)))
        w_structure = tape.constant(np.zeros((batch.size, 1)))
        fv = gv
    global_output = global_vae_forward(tape, bound, config, fv, mode, rng)
    return ForwardOutput(
        parts=parts,
        targets=targets,
        mask=mask,
        alpha=alpha,
        w_geometry=w_geometry,
        w_structure=w_structure,
        gv=gv,
        fv=fv,
        global_=global_output,
    )
