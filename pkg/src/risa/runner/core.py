import logging
import math
import pathlib
import time
from typing import Dict, Generator, List, Optional, Sequence

import attr
import numpy as np

from ..dataset import FeatureSet
from ..exceptions import DivergedLoss, NonFinite
from ..hooks import HookContext, dispatch
from ..model import ModelConfig, Mode, ShapeBatch, ShapeInput, init_params, model_forward
from ..tensor import ParameterSet, Tape, adam_step, save_checkpoint
from . import events
from .batching import stratified_batches
from .config import TrainConfig
from .loss_log import LossRecord
from .losses import global_vae_loss, part_vae_loss, triplet_loss
from .triplets import mine_triplets

logger = logging.getLogger(__name__)

# Standard deviations below this are treated as constant channels and left unscaled
MIN_FEATURE_STD = 1e-12
COMPONENTS = ("l_vae_part", "l_vae_global", "l_trip_part", "l_trip_global")


def fit_scaler(params: ParameterSet, inputs: Sequence[ShapeInput]) -> None:
    """Store per-channel mean and std of the base features of all present parts."""
    rows = [item.base[slot] for item in inputs for slot in np.flatnonzero(item.mask)]
    if not rows:
        return
    values = np.concatenate(rows, axis=0)
    std = values.std(axis=0)
    params.buffers["scaler/mean"] = values.mean(axis=0)
    params.buffers["scaler/std"] = np.where(std > MIN_FEATURE_STD, std, 1.0)


def checkpoint_metadata(
    model_config: ModelConfig, body_label: int, epoch: int, seed: int
) -> Dict[str, np.ndarray]:
    metadata = model_config.to_metadata()
    metadata["body_slot"] = np.array(float(body_label))
    metadata["epoch"] = np.array(float(epoch))
    metadata["seed"] = np.array(float(seed))
    return metadata


def relative_improvement(previous: float, current: float) -> float:
    return (previous - current) / max(abs(previous), np.finfo(np.float64).tiny)


@attr.s(slots=True)  # pragma: no mutate
class StepResult:
    components: Dict[str, float] = attr.ib()  # pragma: no mutate


# pylint: disable=too-many-instance-attributes
@attr.s  # pragma: no mutate
class TrainingRunner:
    """End-to-end optimization of the whole network on a feature set."""

    features: FeatureSet = attr.ib()  # pragma: no mutate
    model_config: ModelConfig = attr.ib()  # pragma: no mutate
    config: TrainConfig = attr.ib(factory=TrainConfig)  # pragma: no mutate
    checkpoint_path: Optional[pathlib.Path] = attr.ib(default=None)  # pragma: no mutate
    params: Optional[ParameterSet] = attr.ib(default=None, init=False)  # pragma: no mutate

    def execute(self) -> Generator[events.ExecutionEvent, None, None]:
        """Train and report progress as events.

        Failures become an ``InternalError`` event, the generator never raises.
        """
        try:
            yield from self._execute()
        except KeyboardInterrupt:
            yield events.Interrupted()
        except Exception as exc:  # pylint: disable=broad-except
            yield events.InternalError.from_exc(exc)

    def _execute(self) -> Generator[events.ExecutionEvent, None, None]:
        config = self.config
        init_seed, batch_seed = np.random.SeedSequence(config.seed).spawn(2)
        params = self.params = init_params(self.model_config, init_seed)
        inputs = self.features.inputs
        if config.normalize_features:
            fit_scaler(params, inputs)
        labels = self.features.labels
        rng = np.random.default_rng(batch_seed)
        initialized = events.Initialized(
            shapes_count=len(inputs),
            batches_count=math.ceil(len(inputs) / config.batch_size),
            epochs=config.epochs,
            parameters_count=params.count(),
        )
        yield initialized

        history: List[float] = []
        record: Optional[LossRecord] = None
        converged = False
        epoch = 0
        for epoch in range(1, config.epochs + 1):
            epoch_start = time.monotonic()
            totals = dict.fromkeys(COMPONENTS, 0.0)
            batches = stratified_batches(labels, config.batch_size, rng)
            for indices in batches:
                step = self._step(params, ShapeBatch.from_inputs([inputs[idx] for idx in indices]), rng)
                for name, value in step.components.items():
                    totals[name] += value
            means = {name: value / len(batches) for name, value in totals.items()}
            record = LossRecord.from_components(
                epoch,
                config,
                means["l_vae_part"],
                means["l_vae_global"],
                means["l_trip_part"],
                means["l_trip_global"],
            )
            dispatch("after_epoch", HookContext(epoch=epoch), record)
            yield events.EpochFinished(epoch=epoch, record=record, elapsed_time=time.monotonic() - epoch_start)
            if self.checkpoint_path is not None and epoch % config.checkpoint_every == 0 and epoch < config.epochs:
                yield self._save(params, epoch)
            history.append(record.total)
            if config.patience and len(history) > config.patience:
                improvement = relative_improvement(history[-config.patience - 1], record.total)
                if improvement < config.tolerance:
                    logger.info("Converged after %d epochs, relative improvement %.3g", epoch, improvement)
                    converged = True
                    yield events.Converged(epoch=epoch, improvement=improvement)
                    break
        checkpoint_path = None
        if self.checkpoint_path is not None:
            saved = self._save(params, epoch)
            checkpoint_path = saved.path
            yield saved
        yield events.Finished(
            epochs_run=epoch,
            record=record,
            checkpoint_path=checkpoint_path,
            converged=converged,
            running_time=time.monotonic() - initialized.start_time,
        )

    def _step(self, params: ParameterSet, batch: ShapeBatch, rng: np.random.Generator) -> StepResult:
        """One Adam update on a batch."""
        config = self.config
        tape = Tape()
        try:
            output = model_forward(
                batch, params, self.model_config, self.features.adjacency, Mode.train, tape=tape, rng=rng
            )
            l_part = part_vae_loss(tape, output, config.gamma)
            l_global = global_vae_loss(tape, output, config.gamma)
            total = tape.add(l_part, tape.scale(l_global, config.lambda1))
            components = {"l_vae_part": l_part.item(), "l_vae_global": l_global.item()}
            triplets = mine_triplets([str(label) for label in batch.labels])
            if triplets:
                l_trip_part = triplet_loss(tape, output.gv, triplets, config.eta, config.triplet_reduction)
                l_trip_global = triplet_loss(tape, output.descriptor, triplets, config.eta, config.triplet_reduction)
                total = tape.add(
                    total,
                    tape.add(tape.scale(l_trip_part, config.lambda2), tape.scale(l_trip_global, config.lambda3)),
                )
                components["l_trip_part"] = l_trip_part.item()
                components["l_trip_global"] = l_trip_global.item()
            else:
                components["l_trip_part"] = components["l_trip_global"] = 0.0
        except NonFinite as exc:
            raise DivergedLoss(f"Training diverged at optimizer step {params.step + 1}: {exc}") from exc
        if not np.isfinite(total.item()):
            raise DivergedLoss(f"Training diverged at optimizer step {params.step + 1}: total loss is not finite")
        adam_step(params, tape.backward(total), config.lr)
        return StepResult(components=components)

    def _save(self, params: ParameterSet, epoch: int) -> events.CheckpointSaved:
        path = self.checkpoint_path
        assert path is not None
        path.parent.mkdir(parents=True, exist_ok=True)
        save_checkpoint(
            path, params, checkpoint_metadata(self.model_config, self.features.body_label, epoch, self.config.seed)
        )
        return events.CheckpointSaved(path=str(path), epoch=epoch)
