from enum import Enum
from typing import Any, Dict, Mapping, Tuple

import attr
import numpy as np

from ..constants import STRUCT_DIM
from ..exceptions import ConfigParse
from ..features import BaseFeatureKind


def _positive(instance: Any, attribute: "attr.Attribute", value: int) -> None:
    if value < 1:
        raise ConfigParse(f"`{attribute.name}` must be >= 1, got {value}")


def _widths(instance: Any, attribute: "attr.Attribute", value: Tuple[int, ...]) -> None:
    if not value or any(width < 1 for width in value):
        raise ConfigParse(f"`{attribute.name}` must be a non-empty list of positive widths, got {list(value)}")


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class ModelConfig:
    """Architecture of the whole network.

    ``parts`` is the number of part slots P and ``edges`` the template edge count E.
    """

    parts: int = attr.ib(validator=_positive)  # pragma: no mutate
    edges: int = attr.ib(validator=_positive)  # pragma: no mutate
    latent_dim: int = attr.ib(default=64, validator=_positive)  # pragma: no mutate
    descriptor_dim: int = attr.ib(default=64, validator=_positive)  # pragma: no mutate
    attention_dim: int = attr.ib(default=64, validator=_positive)  # pragma: no mutate
    encoder_widths: Tuple[int, ...] = attr.ib(
        default=(16, 32, 64), converter=tuple, validator=_widths
    )  # pragma: no mutate
    global_widths: Tuple[int, ...] = attr.ib(
        default=(512, 256, 128), converter=tuple, validator=_widths
    )  # pragma: no mutate
    geo_hidden: int = attr.ib(default=32, validator=_positive)  # pragma: no mutate
    struct_hidden: int = attr.ib(default=16, validator=_positive)  # pragma: no mutate
    # VAE when set, plain autoencoder otherwise
    variational: bool = attr.ib(default=True)  # pragma: no mutate
    use_structure: bool = attr.ib(default=True)  # pragma: no mutate
    base_feature: BaseFeatureKind = attr.ib(
        default=BaseFeatureKind.scale_sensitive, converter=BaseFeatureKind
    )  # pragma: no mutate
    share_part_weights: bool = attr.ib(default=False)  # pragma: no mutate

    @property
    def in_channels(self) -> int:
        return self.base_feature.channels

    @property
    def part_block(self) -> int:
        """Width of one part's block in the global feature."""
        return self.latent_dim + STRUCT_DIM if self.use_structure else self.latent_dim

    @property
    def global_input_dim(self) -> int:
        return self.parts * self.part_block

    def to_metadata(self) -> Dict[str, np.ndarray]:
        """Numeric form stored next to the parameters in a checkpoint."""
        kinds = list(BaseFeatureKind)
        return {
            "config/parts": np.array(float(self.parts)),
            "config/edges": np.array(float(self.edges)),
            "config/latent_dim": np.array(float(self.latent_dim)),
            "config/descriptor_dim": np.array(float(self.descriptor_dim)),
            "config/attention_dim": np.array(float(self.attention_dim)),
            "config/encoder_widths": np.array(self.encoder_widths, dtype=np.float64),
            "config/global_widths": np.array(self.global_widths, dtype=np.float64),
            "config/geo_hidden": np.array(float(self.geo_hidden)),
            "config/struct_hidden": np.array(float(self.struct_hidden)),
            "config/variational": np.array(float(self.variational)),
            "config/use_structure": np.array(float(self.use_structure)),
            "config/base_feature": np.array(float(kinds.index(self.base_feature))),
            "config/share_part_weights": np.array(float(self.share_part_weights)),
        }

    @classmethod
    def from_metadata(cls, metadata: Mapping[str, np.ndarray]) -> "ModelConfig":
        try:
            return cls(
                parts=int(metadata["config/parts"]),
                edges=int(metadata["config/edges"]),
                latent_dim=int(metadata["config/latent_dim"]),
                descriptor_dim=int(metadata["config/descriptor_dim"]),
                attention_dim=int(metadata["config/attention_dim"]),
                encoder_widths=tuple(int(width) for width in metadata["config/encoder_widths"]),
                global_widths=tuple(int(width) for width in metadata["config/global_widths"]),
                geo_hidden=int(metadata["config/geo_hidden"]),
                struct_hidden=int(metadata["config/struct_hidden"]),
                variational=bool(metadata["config/variational"]),
                use_structure=bool(metadata["config/use_structure"]),
                base_feature=list(BaseFeatureKind)[int(metadata["config/base_feature"])],
                share_part_weights=bool(metadata["config/share_part_weights"]),
            )
        except KeyError as exc:
            raise ConfigParse(f"Checkpoint lacks model configuration entry {exc}")


class Mode(Enum):
    train = "train"
    eval = "eval"

    @property
    def training(self) -> bool:
        return self is Mode.train
