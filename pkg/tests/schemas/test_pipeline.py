"""Tests for the experiment configuration document"""

import json

import pytest
from pydantic import ValidationError

from src.core.exceptions import ConfigError
from src.gan.trainer import TrainConfig
from src.schemas.pipeline import (
    PathsConfig,
    PipelineConfig,
    default_config,
    load_config,
    save_config,
)


class TestDefaults:
    def test_desk_scale(self):
        cfg = default_config()
        assert cfg.version == 1
        assert cfg.zooms == [15, 18]
        assert cfg.tile_counts == {15: 64, 18: 256}
        assert cfg.tile_size == 64
        assert cfg.test_fraction == 0.2
        assert cfg.nonmap_count == 400
        assert cfg.models == ["pix2pix", "cyclegan"]

    def test_center_is_madison(self):
        point = default_config().center.point()
        assert (point.lat, point.lon) == (43.0731, -89.4012)

    def test_hash_stable(self):
        assert default_config().hash() == default_config().hash()
        assert default_config().hash() != PipelineConfig(seed=1).hash()


class TestValidation:
    def test_zoom_out_of_range(self):
        with pytest.raises(ValidationError):
            PipelineConfig(zooms=[21], tile_counts={21: 1})

    def test_duplicate_zooms(self):
        with pytest.raises(ValidationError):
            PipelineConfig(zooms=[15, 15])

    def test_zooms_sorted(self):
        assert PipelineConfig(zooms=[18, 15]).zooms == [15, 18]

    def test_count_missing_for_zoom(self):
        with pytest.raises(ValidationError, match="tile_counts"):
            PipelineConfig(zooms=[15, 17])

    def test_non_positive_count(self):
        with pytest.raises(ValidationError):
            PipelineConfig(zooms=[15], tile_counts={15: 0})

    def test_paths_must_differ(self):
        with pytest.raises(ValidationError, match="distinct"):
            PathsConfig(tilesets="out", checkpoints="out")

    def test_model_image_size_follows_tile_size(self):
        with pytest.raises(ValidationError, match="image_size"):
            PipelineConfig(tile_size=128)
        cfg = PipelineConfig(
            tile_size=128,
            pix2pix=TrainConfig(image_size=128),
            cyclegan=TrainConfig(image_size=128),
        )
        assert cfg.train_config("cyclegan").image_size == 128

    def test_unknown_model(self):
        with pytest.raises(ValidationError):
            PipelineConfig(models=["stylegan"])
        with pytest.raises(ConfigError):
            default_config().train_config("stylegan")

    def test_unknown_key(self):
        with pytest.raises(ValidationError):
            PipelineConfig(colour="blue")


class TestFile:
    def test_round_trip(self, tmp_path):
        cfg = PipelineConfig(seed=7, zooms=[17], tile_counts={17: 4})
        path = save_config(cfg, tmp_path / "cartogan.json")
        loaded = load_config(path)
        assert loaded.seed == 7
        assert loaded.tile_counts == {17: 4}
        assert loaded.hash() != cfg.hash()  # paths resolved against the file
        assert loaded.paths.tilesets == tmp_path / "artifacts" / "tilesets"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "none.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{ not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_config(path)

    def test_version_required(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"seed": 1}), encoding="utf-8")
        with pytest.raises(ConfigError, match="version"):
            load_config(path)

    def test_wrong_version(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"version": 2}), encoding="utf-8")
        with pytest.raises(ConfigError, match="version"):
            load_config(path)

    def test_unknown_key_names_field_and_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"version": 1, "pix2pix": {"epoch": 3}}), encoding="utf-8")
        with pytest.raises(ConfigError) as exc:
            load_config(path)
        assert "pix2pix.epoch" in str(exc.value)
        assert str(path) in str(exc.value)
