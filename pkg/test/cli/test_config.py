import pytest

from risa.cli.config import EvaluationConfig, RunConfig, load_run_config
from risa.exceptions import ConfigParse
from risa.features import BaseFeatureKind

from ..utils import SMALL_MODEL


def test_defaults():
    config = load_run_config(None)
    assert config == RunConfig()
    assert config.evaluation.pool == "test"
    assert config.evaluation.top_k == 10
    assert config.base_feature is BaseFeatureKind.scale_sensitive


def test_empty_document(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("")
    assert load_run_config(path) == RunConfig()


def test_from_dict():
    raw = {
        "seed": 7,
        "paths": {"dataset": "data"},
        "model": dict(SMALL_MODEL, base_feature="scale-invariant"),
        "train": {"epochs": 3, "triplet_reduction": "mean"},
        "evaluation": {"pool": "all"},
    }
    config = RunConfig.from_dict(raw)
    # The run seed drives training
    assert config.train.seed == 7
    assert config.train.epochs == 3
    assert config.train.triplet_reduction == "mean"
    assert config.paths.dataset == "data"
    assert config.evaluation.pool == "all"
    assert config.base_feature is BaseFeatureKind.scale_invariant
    model = config.model_config(parts=3, edges=72)
    assert (model.parts, model.edges, model.latent_dim) == (3, 72, 4)
    assert model.base_feature is BaseFeatureKind.scale_invariant


def test_json_document(tmp_path):
    path = tmp_path / "run.json"
    path.write_text('{"seed": 2, "train": {"lr": 0.01}}')
    config = load_run_config(path)
    assert (config.seed, config.train.lr) == (2, 0.01)


def test_overrides():
    config = RunConfig.from_dict({"seed": 1, "paths": {"dataset": "data", "output": "out"}})
    overridden = config.with_overrides(seed=4, checkpoint="model.risa", epochs=9, pool="all")
    assert (overridden.seed, overridden.train.seed, overridden.train.epochs) == (4, 4, 9)
    assert overridden.paths.dataset == "data"
    assert overridden.paths.output == "out"
    assert overridden.paths.checkpoint == "model.risa"
    assert overridden.evaluation.pool == "all"
    assert config.with_overrides(top_k=3).evaluation == EvaluationConfig(pool="test", top_k=3)
    # No overrides, no changes
    assert config.with_overrides() == config


@pytest.mark.parametrize(
    "document",
    (
        "seed: one\n",
        "paths:\n  logs: somewhere\n",
        "evaluation:\n  pool: train\n",
        "model:\n  base_feature: curvature\n",
        "train:\n  eta: 1.5\n",
        "- seed\n",
        "seed: [1\n",
    ),
)
def test_invalid(tmp_path, document):
    path = tmp_path / "run.yaml"
    path.write_text(document)
    with pytest.raises(ConfigParse):
        load_run_config(path)
