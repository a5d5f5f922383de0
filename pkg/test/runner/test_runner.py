import numpy as np
import pytest

from risa import hooks
from risa.exceptions import ConfigParse, ShapeMismatch
from risa.model import ModelConfig, ShapeBatch, init_params
from risa.runner import TrainConfig, events, fit_scaler, prepare, train
from risa.tensor import ParameterSet, load_checkpoint

from ..utils import SMALL_MODEL


def quick_config(**kwargs):
    options = {"lr": 1e-3, "gamma": 1.0, "lambda1": 1.0, "lambda2": 1.0, "lambda3": 1.0, "epochs": 2, "patience": 0}
    options.update(kwargs)
    return TrainConfig(**options)


def execute(features, model_config, config, checkpoint_path=None):
    runner = prepare(features, model_config, config, checkpoint_path)
    return list(runner.execute())


def test_defaults():
    config = TrainConfig()
    assert (config.lr, config.batch_size, config.gamma) == (1e-5, 8, 1e5)
    assert (config.lambda1, config.lambda2, config.lambda3, config.eta) == (1e3, 1e2, 1e2, 0.3)


@pytest.mark.parametrize(
    "kwargs",
    ({"lr": 0}, {"batch_size": 1}, {"eta": 1.0}, {"gamma": -1.0}, {"epochs": 0}, {"triplet_reduction": "max"}),
)
def test_invalid_config(kwargs):
    with pytest.raises((ConfigParse, ValueError)):
        TrainConfig(**kwargs)


def test_event_sequence(tmp_path, toy_features, small_config):
    all_events = execute(toy_features, small_config, quick_config(), tmp_path / "model.risa")
    assert [type(event) for event in all_events] == [
        events.Initialized,
        events.EpochFinished,
        events.EpochFinished,
        events.CheckpointSaved,
        events.Finished,
    ]
    initialized, finished = all_events[0], all_events[-1]
    assert initialized.shapes_count == 20
    assert initialized.batches_count == 3
    assert finished.epochs_run == 2
    assert not finished.converged
    assert finished.checkpoint_path == str(tmp_path / "model.risa")
    assert [event.epoch for event in all_events[1:3]] == [1, 2]


def test_periodic_checkpoints(tmp_path, toy_features, small_config):
    all_events = execute(toy_features, small_config, quick_config(epochs=3, checkpoint_every=1), tmp_path / "m.risa")
    saved = [event.epoch for event in all_events if isinstance(event, events.CheckpointSaved)]
    assert saved == [1, 2, 3]


def test_convergence(toy_features, small_config):
    all_events = execute(toy_features, small_config, quick_config(epochs=10, patience=1, tolerance=1e9))
    assert [type(event) for event in all_events][-2:] == [events.Converged, events.Finished]
    assert all_events[-2].epoch == 2
    assert all_events[-1].converged
    assert all_events[-1].epochs_run == 2


def test_internal_error(toy_features):
    wrong = ModelConfig(parts=toy_features.parts, edges=72, **SMALL_MODEL)
    all_events = execute(toy_features, wrong, quick_config())
    assert isinstance(all_events[-1], events.InternalError)
    assert all_events[-1].exception_type == "risa.exceptions.ShapeMismatch"
    with pytest.raises(ShapeMismatch):
        train(toy_features, wrong, quick_config())


def test_training_decreases_loss(toy_features, small_config):
    result = train(toy_features, small_config, quick_config(epochs=50))
    totals = [record.total for record in result.records]
    assert len(totals) == 50
    assert np.mean(totals[-5:]) < np.mean(totals[:5])
    assert all(np.isfinite(totals))


def test_total_without_triplets(toy_features, small_config):
    result = train(toy_features, small_config, quick_config(lambda2=0.0, lambda3=0.0))
    for record in result.records:
        assert record.l_trip_part > 0
        assert record.total == pytest.approx(record.l_vae_part + record.l_vae_global)


def test_deterministic(tmp_path, toy_features, small_config):
    train(toy_features, small_config, quick_config(seed=5), tmp_path / "first.risa")
    train(toy_features, small_config, quick_config(seed=5), tmp_path / "second.risa")
    assert (tmp_path / "first.risa").read_bytes() == (tmp_path / "second.risa").read_bytes()


def test_checkpoint_metadata(tmp_path, toy_features, small_config):
    result = train(toy_features, small_config, quick_config(seed=5), tmp_path / "model.risa")
    params, metadata = load_checkpoint(tmp_path / "model.risa")
    assert ModelConfig.from_metadata(metadata) == small_config
    assert int(metadata["body_slot"]) == toy_features.body_label == 1
    assert int(metadata["epoch"]) == 2
    assert params.step == result.params.step == 2 * 3
    assert np.array_equal(params.params["global/mu/w"], result.params.params["global/mu/w"])


def test_after_epoch_hook(toy_features, small_config):
    seen = []

    @hooks.register
    def after_epoch(context, record):
        seen.append((context.epoch, record.epoch))

    train(toy_features, small_config, quick_config(epochs=3))
    assert seen == [(1, 1), (2, 2), (3, 3)]


def test_fit_scaler(toy_features):
    params = ParameterSet()
    fit_scaler(params, toy_features.inputs)
    rows = np.concatenate([item.base[slot] for item in toy_features.inputs for slot in np.flatnonzero(item.mask)])
    assert np.allclose(params.buffers["scaler/mean"], rows.mean(axis=0))
    assert np.allclose(params.buffers["scaler/std"], rows.std(axis=0))


def test_fit_scaler_constant_channel(toy_features):
    params = ParameterSet()
    item = toy_features.inputs[0]
    constant = type(item)(base=np.ones_like(item.base), structure=item.structure, mask=item.mask)
    fit_scaler(params, [constant])
    assert params.buffers["scaler/std"].tolist() == [1.0, 1.0]


def step_gradients(mocker, features, model_config, config):
    """Gradients of one optimizer step on a batch with two shapes of every sub-class."""
    captured = {}
    mocker.patch("risa.runner.core.adam_step", side_effect=lambda params, grads, lr: captured.update(grads))
    params = init_params(model_config, 0)
    fit_scaler(params, features.inputs)
    labels = features.labels
    picked = [idx for label in sorted(set(labels)) for idx in [i for i, x in enumerate(labels) if x == label][:2]]
    batch = ShapeBatch.from_inputs([features.inputs[idx] for idx in picked])
    prepare(features, model_config, config)._step(params, batch, np.random.default_rng(0))
    return captured


def test_global_triplet_term_trains_the_descriptor(mocker, toy_features, small_config):
    config = quick_config(gamma=0.0, lambda1=0.0, lambda2=0.0, lambda3=1.0, eta=0.9)
    grads = step_gradients(mocker, toy_features, small_config, config)
    assert np.abs(grads["global/mu/w"]).max() > 0
    assert np.abs(grads["global/enc1/w"]).max() > 0


def test_part_triplet_term_stops_before_the_global_vae(mocker, toy_features, small_config):
    config = quick_config(gamma=0.0, lambda1=0.0, lambda2=1.0, lambda3=0.0, eta=0.9)
    grads = step_gradients(mocker, toy_features, small_config, config)
    assert not np.any(grads["global/mu/w"])
    assert np.abs(grads["attention/key1"]).max() > 0
