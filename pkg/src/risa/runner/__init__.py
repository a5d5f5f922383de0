import pathlib
from typing import List, Optional, Union

import attr

from ..dataset import FeatureSet
from ..model import ModelConfig
from ..tensor import ParameterSet
from . import events
from .config import TRIPLET_REDUCTIONS, TrainConfig
from .core import TrainingRunner, fit_scaler
from .loss_log import LOSS_LOG_COLUMNS, LossRecord, read_loss_log, weighted_total
from .losses import global_vae_loss, part_vae_loss, triplet_loss, vae_loss
from .triplets import Triplet, mine_triplets


def prepare(
    features: FeatureSet,
    model_config: Optional[ModelConfig] = None,
    config: Optional[TrainConfig] = None,
    checkpoint_path: Optional[Union[str, pathlib.Path]] = None,
) -> TrainingRunner:
    """Prepare a runner whose ``execute`` generator trains a model on ``features``.

    Without a model config the network is sized from the feature set with default widths.
    """
    if model_config is None:
        model_config = ModelConfig(parts=features.parts, edges=features.edges_count, base_feature=features.kind)
    return TrainingRunner(
        features=features,
        model_config=model_config,
        config=config if config is not None else TrainConfig(),
        checkpoint_path=pathlib.Path(checkpoint_path) if checkpoint_path is not None else None,
    )


@attr.s(slots=True)  # pragma: no mutate
class TrainResult:
    params: ParameterSet = attr.ib()  # pragma: no mutate
    records: List[LossRecord] = attr.ib()  # pragma: no mutate
    epochs_run: int = attr.ib()  # pragma: no mutate
    converged: bool = attr.ib()  # pragma: no mutate
    checkpoint_path: Optional[str] = attr.ib(default=None)  # pragma: no mutate


def train(
    features: FeatureSet,
    model_config: Optional[ModelConfig] = None,
    config: Optional[TrainConfig] = None,
    checkpoint_path: Optional[Union[str, pathlib.Path]] = None,
) -> TrainResult:
    """Train to completion, re-raising the error of a failed run."""
    runner = prepare(features, model_config, config, checkpoint_path)
    records: List[LossRecord] = []
    for event in runner.execute():
        if isinstance(event, events.EpochFinished):
            records.append(event.record)
        elif isinstance(event, events.InternalError):
            if event.error is not None:
                raise event.error
            raise RuntimeError(event.message)
        elif isinstance(event, events.Interrupted):
            raise KeyboardInterrupt
        elif isinstance(event, events.Finished):
            assert runner.params is not None
            return TrainResult(
                params=runner.params,
                records=records,
                epochs_run=event.epochs_run,
                converged=event.converged,
                checkpoint_path=event.checkpoint_path,
            )
    raise RuntimeError("Training finished without a final event")
