"""Descriptors and attention weights of shapes under a trained model."""
import csv
import logging
import pathlib
from typing import List, Optional, Union

import attr
import numpy as np

from .dataset import DatasetManifest, FeatureSet, extract_features
from .mesh import EdgeAdjacency
from .model import ModelConfig, Mode, ShapeInput, model_forward
from .retrieval import DescriptorIndex
from .tensor import ParameterSet, load_checkpoint
from .threadpool import ordered_map

logger = logging.getLogger(__name__)


@attr.s(slots=True)  # pragma: no mutate
class TrainedModel:
    params: ParameterSet = attr.ib()  # pragma: no mutate
    config: ModelConfig = attr.ib()  # pragma: no mutate
    # 1-based body part slot the model was trained with
    body_label: int = attr.ib()  # pragma: no mutate

    @classmethod
    def from_checkpoint(cls, path: Union[str, pathlib.Path]) -> "TrainedModel":
        params, metadata = load_checkpoint(path)
        config = ModelConfig.from_metadata(metadata)
        body_label = int(metadata["body_slot"]) if "body_slot" in metadata else 1
        return cls(params=params, config=config, body_label=body_label)

    def features(
        self, manifest: DatasetManifest, split: Optional[str] = None, workers_num: int = 1
    ) -> FeatureSet:
        """Features of a manifest, extracted the way the model expects them."""
        return extract_features(
            manifest, kind=self.config.base_feature, body_label=self.body_label, split=split, workers_num=workers_num
        )


@attr.s(slots=True, frozen=True, eq=False)  # pragma: no mutate
class Embedding:
    shape_id: str = attr.ib()  # pragma: no mutate
    label: str = attr.ib()  # pragma: no mutate
    descriptor: np.ndarray = attr.ib()  # pragma: no mutate
    # Part-Geo attention over the part slots
    alpha: np.ndarray = attr.ib()  # pragma: no mutate
    w_geometry: float = attr.ib()  # pragma: no mutate
    w_structure: float = attr.ib()  # pragma: no mutate


def embed_shape(model: TrainedModel, item: ShapeInput, adjacency: EdgeAdjacency) -> Embedding:
    output = model_forward(item, model.params, model.config, adjacency, mode=Mode.eval)
    return Embedding(
        shape_id=str(item.shape_id),
        label=str(item.label),
        descriptor=output.descriptor.data[0].copy(),
        alpha=output.alpha.data[0].copy(),
        w_geometry=float(output.w_geometry.data[0, 0]),
        w_structure=float(output.w_structure.data[0, 0]),
    )


def embed(model: TrainedModel, features: FeatureSet, workers_num: int = 1) -> List[Embedding]:
    """Embed every shape on its own, in evaluation mode, keeping the feature-set order."""
    embeddings = ordered_map(lambda item: embed_shape(model, item, features.adjacency), features.inputs, workers_num)
    logger.info("Embedded %d shapes", len(embeddings))
    return embeddings


def write_attention_report(path: Union[str, pathlib.Path], embeddings: List[Embedding]) -> None:
    """CSV of attention weights: ``id,label,alpha_1..alpha_P,w_geo,w_struct``."""
    parts = embeddings[0].alpha.shape[0] if embeddings else 0
    with open(path, "w", newline="", encoding="utf-8") as fd:
        writer = csv.writer(fd, lineterminator="\n")
        writer.writerow(["id", "label", *(f"alpha_{idx}" for idx in range(1, parts + 1)), "w_geo", "w_struct"])
        for item in embeddings:
            writer.writerow(
                [
                    item.shape_id,
                    item.label,
                    *(f"{value:.17g}" for value in item.alpha),
                    f"{item.w_geometry:.17g}",
                    f"{item.w_structure:.17g}",
                ]
            )


def to_index(embeddings: List[Embedding]) -> DescriptorIndex:
    return DescriptorIndex.from_arrays(
        [item.shape_id for item in embeddings],
        [item.label for item in embeddings],
        np.stack([item.descriptor for item in embeddings]) if embeddings else np.zeros((0, 0)),
    )
