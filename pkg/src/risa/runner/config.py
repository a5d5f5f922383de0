from typing import Any

import attr

from ..exceptions import ConfigParse


def _positive(instance: Any, attribute: "attr.Attribute", value: float) -> None:
    if not value > 0:
        raise ConfigParse(f"`{attribute.name}` must be positive, got {value}")


def _non_negative(instance: Any, attribute: "attr.Attribute", value: float) -> None:
    if value < 0:
        raise ConfigParse(f"`{attribute.name}` must be non-negative, got {value}")


def _margin(instance: Any, attribute: "attr.Attribute", value: float) -> None:
    if not 0 < value < 1:
        raise ConfigParse(f"`{attribute.name}` must be in (0, 1), got {value}")


def _batch_size(instance: Any, attribute: "attr.Attribute", value: int) -> None:
    if value < 2:
        raise ConfigParse(f"`{attribute.name}` must be at least 2, got {value}")


TRIPLET_REDUCTIONS = ("sum", "mean")


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class TrainConfig:
    """Optimization settings.

    The overall objective is ``L_part + λ1·L_global + λ2·L_triplet_part + λ3·L_triplet_global``.
    Each VAE term is a reconstruction error plus ``γ`` times the KL divergence.
    """

    lr: float = attr.ib(default=1e-5, validator=_positive)  # pragma: no mutate
    batch_size: int = attr.ib(default=8, validator=_batch_size)  # pragma: no mutate
    gamma: float = attr.ib(default=1e5, validator=_non_negative)  # pragma: no mutate
    lambda1: float = attr.ib(default=1e3, validator=_non_negative)  # pragma: no mutate
    lambda2: float = attr.ib(default=1e2, validator=_non_negative)  # pragma: no mutate
    lambda3: float = attr.ib(default=1e2, validator=_non_negative)  # pragma: no mutate
    eta: float = attr.ib(default=0.3, validator=_margin)  # pragma: no mutate
    epochs: int = attr.ib(default=2000, validator=_positive)  # pragma: no mutate
    seed: int = attr.ib(default=0)  # pragma: no mutate
    # Write a checkpoint every that many epochs, in addition to the final one
    checkpoint_every: int = attr.ib(default=50, validator=_positive)  # pragma: no mutate
    # Stop when the total loss improved by less than `tolerance` (relative) over the last `patience` epochs
    patience: int = attr.ib(default=20, validator=_non_negative)  # pragma: no mutate
    tolerance: float = attr.ib(default=1e-4, validator=_non_negative)  # pragma: no mutate
    triplet_reduction: str = attr.ib(
        default="sum", validator=attr.validators.in_(TRIPLET_REDUCTIONS)
    )  # pragma: no mutate
    normalize_features: bool = attr.ib(default=True)  # pragma: no mutate
