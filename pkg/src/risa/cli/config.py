import pathlib
from typing import Any, Dict, Optional, Union

import attr

from .. import definitions
from ..exceptions import ConfigParse
from ..features import BaseFeatureKind
from ..loaders import load_document, validate_document
from ..model import ModelConfig
from ..runner import TrainConfig
from ..types import RawConfig

POOL_MODES = ("test", "all")


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class PathsConfig:
    dataset: Optional[str] = attr.ib(default=None)  # pragma: no mutate
    checkpoint: Optional[str] = attr.ib(default=None)  # pragma: no mutate
    output: Optional[str] = attr.ib(default=None)  # pragma: no mutate


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class EvaluationConfig:
    # `test` ranks test shapes among themselves, `all` ranks them against train and test shapes
    pool: str = attr.ib(default="test", validator=attr.validators.in_(POOL_MODES))  # pragma: no mutate
    # Default number of results of `risa query`
    top_k: int = attr.ib(default=10)  # pragma: no mutate


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class RunConfig:
    """Everything a command may need, from a config file with command-line overrides on top."""

    seed: int = attr.ib(default=0)  # pragma: no mutate
    paths: PathsConfig = attr.ib(factory=PathsConfig)  # pragma: no mutate
    # Model options without the dataset-dependent part count and edge count
    model: RawConfig = attr.ib(factory=dict)  # pragma: no mutate
    train: TrainConfig = attr.ib(factory=TrainConfig)  # pragma: no mutate
    evaluation: EvaluationConfig = attr.ib(factory=EvaluationConfig)  # pragma: no mutate

    @classmethod
    def from_dict(cls, raw: RawConfig, location: str = "<config>") -> "RunConfig":
        validate_document(raw, definitions.RUN_CONFIG, location)
        seed = raw.get("seed", 0)
        return cls(
            seed=seed,
            paths=PathsConfig(**raw.get("paths", {})),
            model=dict(raw.get("model", {})),
            train=TrainConfig(seed=seed, **raw.get("train", {})),
            evaluation=EvaluationConfig(**raw.get("evaluation", {})),
        )

    @property
    def base_feature(self) -> BaseFeatureKind:
        return BaseFeatureKind(self.model.get("base_feature", BaseFeatureKind.scale_sensitive.value))

    def model_config(self, parts: int, edges: int) -> ModelConfig:
        return ModelConfig(parts=parts, edges=edges, **self.model)

    def with_overrides(
        self,
        seed: Optional[int] = None,
        dataset: Optional[str] = None,
        checkpoint: Optional[str] = None,
        output: Optional[str] = None,
        epochs: Optional[int] = None,
        pool: Optional[str] = None,
        top_k: Optional[int] = None,
    ) -> "RunConfig":
        config = self
        if seed is not None:
            config = attr.evolve(config, seed=seed, train=attr.evolve(config.train, seed=seed))
        paths: Dict[str, Any] = {
            key: value
            for key, value in (("dataset", dataset), ("checkpoint", checkpoint), ("output", output))
            if value is not None
        }
        if paths:
            config = attr.evolve(config, paths=attr.evolve(config.paths, **paths))
        if epochs is not None:
            config = attr.evolve(config, train=attr.evolve(config.train, epochs=epochs))
        evaluation: Dict[str, Any] = {
            key: value for key, value in (("pool", pool), ("top_k", top_k)) if value is not None
        }
        if evaluation:
            config = attr.evolve(config, evaluation=attr.evolve(config.evaluation, **evaluation))
        return config


def load_run_config(path: Optional[Union[str, pathlib.Path]]) -> RunConfig:
    if path is None:
        return RunConfig()
    raw = load_document(path)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigParse(f"{path}: a config must be a mapping")
    return RunConfig.from_dict(raw, str(path))
