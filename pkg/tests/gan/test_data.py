"""Tests for tile loading and pairing"""

import numpy as np
import pytest

from src.core.exceptions import CorruptTileError, EmptyDatasetError, TileSizeMismatchError
from src.gan.data import load_arrays, paired_entries, unpaired_entries
from src.render.raster import write_tile


class TestLoadArrays:
    def test_order_and_range(self, paired_sets):
        simple, _ = paired_sets
        arrays = load_arrays(simple, simple.entries)
        assert arrays.shape == (4, 3, 64, 64)
        assert arrays.dtype == np.float32
        assert arrays.min() >= -1.0 and arrays.max() <= 1.0
        # stripes: two gray levels
        assert len(np.unique(arrays[0])) == 2

    def test_empty(self, paired_sets):
        simple, _ = paired_sets
        assert load_arrays(simple, []).shape == (0, 3, 64, 64)

    def test_corrupt_tile_names_path(self, paired_sets):
        simple, _ = paired_sets
        path = simple.path_of(simple.entries[1])
        path.write_bytes(b"not an image")
        with pytest.raises(CorruptTileError, match=path.name):
            load_arrays(simple, simple.entries)

    def test_size_disagreeing_with_manifest(self, paired_sets):
        simple, _ = paired_sets
        write_tile(np.zeros((128, 128, 3), dtype=np.uint8), simple.path_of(simple.entries[0]))
        with pytest.raises(TileSizeMismatchError):
            load_arrays(simple, simple.entries[:1])


class TestPairing:
    def test_paired_by_key(self, paired_sets):
        simple, target = paired_sets
        left, right = paired_entries(simple, target, "train")
        assert len(left) == 3
        assert [e.key for e in left] == [e.key for e in right]
        assert [e.key for e in left] == sorted(e.key for e in left)

    def test_no_common_keys(self, paired_sets):
        simple, target = paired_sets
        target.entries = [e for e in target.entries if e.split == "test"]
        with pytest.raises(EmptyDatasetError, match="No paired train tiles"):
            paired_entries(simple, target, "train")

    def test_unpaired(self, paired_sets):
        simple, _ = paired_sets
        assert len(unpaired_entries(simple, "test")) == 1
        with pytest.raises(EmptyDatasetError, match="z16"):
            unpaired_entries(simple, "train", zoom=16)
