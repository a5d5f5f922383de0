"""Binary checkpoints.

Layout: magic ``RISA1``, tensor count, then for every tensor its name length, UTF-8 name, rank, extents and values.
All integers are unsigned 64-bit little-endian, values are 64-bit little-endian floats. Tensors are written sorted by
name, so equal contents give identical bytes.
"""
import logging
import pathlib
import struct
from typing import Dict, Mapping, Tuple, Union

import numpy as np

from ..constants import CHECKPOINT_MAGIC
from ..exceptions import CheckpointFormatError
from .params import ParameterSet

logger = logging.getLogger(__name__)

PARAM_PREFIX = "param/"
BUFFER_PREFIX = "buffer/"
ADAM_M_PREFIX = "adam.m/"
ADAM_V_PREFIX = "adam.v/"
ADAM_STEP = "adam/step"
META_PREFIX = "meta/"

U64 = struct.Struct("<Q")


def encode_tensors(tensors: Mapping[str, np.ndarray]) -> bytes:
    chunks = [CHECKPOINT_MAGIC, U64.pack(len(tensors))]
    for name in sorted(tensors):
        value = np.asarray(tensors[name], dtype="<f8")
        encoded_name = name.encode("utf-8")
        chunks.append(U64.pack(len(encoded_name)))
        chunks.append(encoded_name)
        chunks.append(U64.pack(value.ndim))
        chunks.extend(U64.pack(extent) for extent in value.shape)
        chunks.append(np.ascontiguousarray(value).tobytes())
    return b"".join(chunks)


class _Reader:
    def __init__(self, payload: bytes) -> None:
        self.payload = payload
        self.offset = 0

    def read(self, size: int) -> bytes:
        if self.offset + size > len(self.payload):
            raise CheckpointFormatError("Checkpoint is truncated")
        chunk = self.payload[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def read_u64(self) -> int:
        return int(U64.unpack(self.read(U64.size))[0])


def decode_tensors(payload: bytes) -> Dict[str, np.ndarray]:
    if not payload.startswith(CHECKPOINT_MAGIC):
        raise CheckpointFormatError("Not a checkpoint: magic bytes do not match")
    reader = _Reader(payload)
    reader.read(len(CHECKPOINT_MAGIC))
    tensors = {}
    for _ in range(reader.read_u64()):
        try:
            name = reader.read(reader.read_u64()).decode("utf-8")
        except UnicodeDecodeError:
            raise CheckpointFormatError("Tensor name is not valid UTF-8")
        shape = tuple(reader.read_u64() for _ in range(reader.read_u64()))
        size = int(np.prod(shape, dtype=np.int64))
        tensors[name] = np.frombuffer(reader.read(size * 8), dtype="<f8").astype(np.float64).reshape(shape)
    if reader.offset != len(payload):
        raise CheckpointFormatError("Unexpected trailing bytes after the last tensor")
    return tensors


def save_checkpoint(
    path: Union[str, pathlib.Path], params: ParameterSet, metadata: Mapping[str, np.ndarray]
) -> None:
    tensors: Dict[str, np.ndarray] = {}
    for name, value in params.params.items():
        tensors[PARAM_PREFIX + name] = value
        tensors[ADAM_M_PREFIX + name] = params.adam_m[name]
        tensors[ADAM_V_PREFIX + name] = params.adam_v[name]
    for name, value in params.buffers.items():
        tensors[BUFFER_PREFIX + name] = value
    tensors[ADAM_STEP] = np.array(float(params.step))
    for name, value in metadata.items():
        tensors[META_PREFIX + name] = np.asarray(value, dtype=np.float64)
    pathlib.Path(path).write_bytes(encode_tensors(tensors))
    logger.info("Saved %d tensors to %s", len(tensors), path)


def load_checkpoint(path: Union[str, pathlib.Path]) -> Tuple[ParameterSet, Dict[str, np.ndarray]]:
    tensors = decode_tensors(pathlib.Path(path).read_bytes())
    params = ParameterSet()
    metadata = {}
    for name, value in tensors.items():
        if name.startswith(PARAM_PREFIX):
            params.params[name[len(PARAM_PREFIX) :]] = value
        elif name.startswith(BUFFER_PREFIX):
            params.buffers[name[len(BUFFER_PREFIX) :]] = value
        elif name.startswith(ADAM_M_PREFIX):
            params.adam_m[name[len(ADAM_M_PREFIX) :]] = value
        elif name.startswith(ADAM_V_PREFIX):
            params.adam_v[name[len(ADAM_V_PREFIX) :]] = value
        elif name.startswith(META_PREFIX):
            metadata[name[len(META_PREFIX) :]] = value
    if ADAM_STEP in tensors:
        params.step = int(tensors[ADAM_STEP])
    if params.adam_m.keys() != params.params.keys() or params.adam_v.keys() != params.params.keys():
        raise CheckpointFormatError("Optimizer state does not cover every parameter")
    return params, metadata
