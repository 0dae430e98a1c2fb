"""
CGT1 tensor blob

Layout: the magic `CGT1`, then one record per tensor until end of file:
u32 name length, UTF-8 name, u32 rank, rank x u32 dims, float32 payload.
All integers and floats are little-endian.
"""

import struct
from pathlib import Path
from typing import Mapping, Union

import numpy as np
from loguru import logger

from src.core.exceptions import CorruptCheckpointError

MAGIC = b"CGT1"
_U32 = struct.Struct("<I")
_F32 = np.dtype("<f4")


def dumps_tensors(tensors: Mapping[str, np.ndarray]) -> bytes:
    """Encode arrays in mapping order; values are stored as float32"""
    parts = [MAGIC]
    for name, array in tensors.items():
        encoded = name.encode("utf-8")
        data = np.ascontiguousarray(array, dtype=_F32)
        parts.append(_U32.pack(len(encoded)))
        parts.append(encoded)
        parts.append(_U32.pack(data.ndim))
        parts.extend(_U32.pack(d) for d in data.shape)
        parts.append(data.tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    @property
    def done(self) -> bool:
        return self.pos >= len(self.blob)

    def take(self, n: int, what: str) -> bytes:
        end = self.pos + n
        if end > len(self.blob):
            raise CorruptCheckpointError(f"Truncated blob while reading {what} at byte {self.pos}")
        chunk = self.blob[self.pos : end]
        self.pos = end
        return chunk

    def u32(self, what: str) -> int:
        return _U32.unpack(self.take(4, what))[0]


def loads_tensors(blob: bytes) -> dict[str, np.ndarray]:
    if blob[:4] != MAGIC:
        raise CorruptCheckpointError(f"Bad magic {blob[:4]!r}, expected {MAGIC!r}")
    reader = _Reader(blob)
    reader.pos = len(MAGIC)
    tensors: dict[str, np.ndarray] = {}
    while not reader.done:
        try:
            name = reader.take(reader.u32("name length"), "name").decode("utf-8")
        except UnicodeDecodeError as e:
            raise CorruptCheckpointError(f"Tensor name is not UTF-8: {e}") from e
        if name in tensors:
            raise CorruptCheckpointError(f"Duplicate tensor {name!r}")
        rank = reader.u32(f"rank of {name}")
        shape = tuple(reader.u32(f"dims of {name}") for _ in range(rank))
        count = int(np.prod(shape, dtype=np.int64))
        payload = reader.take(count * _F32.itemsize, f"payload of {name}")
        tensors[name] = np.frombuffer(payload, dtype=_F32).astype(np.float32).reshape(shape)
    return tensors


def save_tensors(tensors: Mapping[str, np.ndarray], path: Union[str, Path]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps_tensors(tensors))
    logger.debug(f"Saved {len(tensors)} tensors to {path}")


def load_tensors(path: Union[str, Path]) -> dict[str, np.ndarray]:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except FileNotFoundError as e:
        raise CorruptCheckpointError(f"Tensor blob not found: {path}") from e
    try:
        return loads_tensors(blob)
    except CorruptCheckpointError as e:
        raise CorruptCheckpointError(f"{path}: {e}") from e
