"""Tests for the CGT1 tensor blob"""

import struct

import numpy as np
import pytest

from src.autograd.serialization import (
    MAGIC,
    dumps_tensors,
    load_tensors,
    loads_tensors,
    save_tensors,
)
from src.core.exceptions import CorruptCheckpointError


def test_hand_assembled_blob():
    expected = (
        b"CGT1"
        + struct.pack("<I", 1)
        + b"w"
        + struct.pack("<I", 2)
        + struct.pack("<II", 1, 2)
        + struct.pack("<ff", 1.0, -2.5)
    )
    assert dumps_tensors({"w": np.array([[1.0, -2.5]])}) == expected


def test_empty_blob_is_magic_only():
    assert dumps_tensors({}) == MAGIC
    assert loads_tensors(MAGIC) == {}


def test_random_tensors_bit_exact():
    rng = np.random.default_rng(4)
    tensors = {}
    for i in range(40):
        rank = int(rng.integers(0, 5))
        shape = tuple(int(d) for d in rng.integers(0, 5, size=rank))
        tensors[f"layer{i}.weight"] = np.asarray(rng.standard_normal(shape), dtype=np.float32)
    tensors["special"] = np.array([np.inf, -np.inf, -0.0, 1e-45], dtype=np.float32)

    restored = loads_tensors(dumps_tensors(tensors))
    assert list(restored) == list(tensors)
    for name, array in tensors.items():
        assert restored[name].shape == array.shape
        assert restored[name].dtype == np.float32
        assert restored[name].tobytes() == array.tobytes()


def test_unicode_names():
    restored = loads_tensors(dumps_tensors({"décodeur.poids": np.ones(2, dtype=np.float32)}))
    assert list(restored) == ["décodeur.poids"]


def test_file_round_trip(tmp_path):
    path = tmp_path / "nested" / "params.cgt"
    tensors = {"a": np.arange(6, dtype=np.float32).reshape(2, 3)}
    save_tensors(tensors, path)
    np.testing.assert_array_equal(load_tensors(path)["a"], tensors["a"])


class TestCorruptBlobs:
    def test_bad_magic(self):
        with pytest.raises(CorruptCheckpointError, match="magic"):
            loads_tensors(b"CGT2" + b"\x00" * 8)

    @pytest.mark.parametrize("cut", [1, 3, 5, 9, 14])
    def test_truncated(self, cut):
        blob = dumps_tensors({"w": np.ones((2, 2), dtype=np.float32)})
        with pytest.raises(CorruptCheckpointError, match="Truncated"):
            loads_tensors(blob[: len(blob) - cut])

    def test_duplicate_name(self):
        one = dumps_tensors({"w": np.ones(1, dtype=np.float32)})
        with pytest.raises(CorruptCheckpointError, match="Duplicate"):
            loads_tensors(one + one[len(MAGIC) :])

    def test_missing_file(self, tmp_path):
        with pytest.raises(CorruptCheckpointError):
            load_tensors(tmp_path / "absent.cgt")

    def test_file_error_names_path(self, tmp_path):
        path = tmp_path / "broken.cgt"
        path.write_bytes(b"nope")
        with pytest.raises(CorruptCheckpointError, match="broken.cgt"):
            load_tensors(path)
