"""Tests for applying a trained generator to a tileset"""

import numpy as np
import pytest

from src.autograd.tensor import Tensor, no_grad
from src.core.exceptions import PrerequisiteMissingError, TileSizeMismatchError
from src.datasets.manifest import MANIFEST_NAME, DatasetManifest, load_manifest
from src.gan.data import load_arrays
from src.gan.trainer import GanTrainer
from src.gan.transfer import load_generator, transfer
from src.render.raster import array_to_tile, read_tile


@pytest.fixture
def checkpoint(tmp_path, small_cfg):
    trainer = GanTrainer("pix2pix", small_cfg, tmp_path / "ck")
    trainer.save()
    return trainer


class TestTransfer:
    def test_writes_transfer_tileset(self, tmp_path, checkpoint, paired_sets):
        simple, _ = paired_sets
        out = transfer(checkpoint.out_dir, simple, tmp_path / "transfer")
        assert out.role == "transfer"
        assert out.keys() == [e.key for e in simple.select("test")]
        assert all(e.split == "test" for e in out.entries)
        reloaded = load_manifest(tmp_path / "transfer")
        assert reloaded.keys() == out.keys()
        assert read_tile(reloaded.path_of(reloaded.entries[0])).size == 64

    def test_outputs_are_ppm_with_optional_png(self, tmp_path, checkpoint, paired_sets):
        simple, _ = paired_sets
        plain = transfer(checkpoint.out_dir, simple, tmp_path / "plain", split=None)
        for entry in plain.entries:
            assert entry.path == f"{entry.key}.ppm"
            assert plain.path_of(entry).read_bytes()[:2] == b"P6"
        assert not list((tmp_path / "plain").rglob("*.png"))

        both = transfer(checkpoint.out_dir, simple, tmp_path / "both", split=None, png_copies=True)
        assert [e.sha256 for e in both.entries] == [e.sha256 for e in plain.entries]
        for entry in both.entries:
            png = both.path_of(entry).with_suffix(".png")
            assert png.read_bytes()[:4] == b"\x89PNG"

    def test_tiles_are_denormalized_generator_outputs(self, tmp_path, checkpoint, paired_sets):
        simple, _ = paired_sets
        out = transfer(checkpoint.out_dir, simple, tmp_path / "transfer", split="train")
        assert len(out) == 3
        G = load_generator(checkpoint.out_dir)
        assert not G.training
        source = simple.entry(out.entries[0].key)
        with no_grad():
            expected = array_to_tile(G(Tensor(load_arrays(simple, [source]))).data[0])
        written = read_tile(out.path_of(out.entries[0]))
        diff = np.abs(written.pixels.astype(int) - expected.pixels.astype(int))
        assert diff.max() <= 1

    def test_deterministic_bytes(self, tmp_path, checkpoint, paired_sets):
        simple, _ = paired_sets
        a = transfer(checkpoint.out_dir, simple, tmp_path / "a", split=None)
        b = transfer(checkpoint.out_dir, simple, tmp_path / "b", split=None)
        assert [e.sha256 for e in a.entries] == [e.sha256 for e in b.entries]
        assert len(a) == 4

    def test_no_tiles(self, tmp_path, checkpoint, paired_sets):
        simple, _ = paired_sets
        out = transfer(checkpoint.out_dir, simple, tmp_path / "empty", zoom=12)
        assert len(out) == 0
        assert (tmp_path / "empty" / MANIFEST_NAME).is_file()
        assert len(load_manifest(tmp_path / "empty")) == 0

    def test_size_mismatch(self, tmp_path, checkpoint):
        big = DatasetManifest(role="simple", tile_size=128).bind(tmp_path)
        with pytest.raises(TileSizeMismatchError):
            transfer(checkpoint.out_dir, big, tmp_path / "out")

    def test_missing_checkpoint(self, tmp_path, paired_sets):
        simple, _ = paired_sets
        with pytest.raises(PrerequisiteMissingError, match="checkpoint"):
            transfer(tmp_path / "nowhere", simple, tmp_path / "out")


def test_cyclegan_checkpoint_uses_forward_generator(tmp_path, small_cfg):
    trainer = GanTrainer("cyclegan", small_cfg, tmp_path)
    trainer.save()
    G = load_generator(tmp_path)
    np.testing.assert_array_equal(G.out.weight.data, trainer.nets["G"].out.weight.data)
