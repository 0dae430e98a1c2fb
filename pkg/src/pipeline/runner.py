"""
Experiment pipeline orchestrator

Stages, each reading the artifacts of the ones before it:

1. dataset      scene, simple / target / non-map tilesets
2. train        one GAN checkpoint per (model, zoom)
3. transfer     G applied to the simple test tiles per (model, zoom)
4. train-ismap  map / non-map classifier
5. evaluate     IsMap over each transfer tileset vs the non-map test split
6. report       comparison table over every evaluation
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from loguru import logger

from src.core.exceptions import ConfigError, PrerequisiteMissingError
from src.datasets.builder import DatasetBuild, build_datasets
from src.datasets.manifest import DatasetManifest, load_manifest
from src.gan.checkpoint import checkpoint_exists
from src.gan.trainer import EpochStats, TrainResult, train
from src.gan.transfer import transfer
from src.ismap.classifier import (
    IsMapClassifier,
    IsMapResult,
    evaluate_tilesets,
    load_training_set,
    train_ismap,
)
from src.ismap.metrics import EvalReport
from src.report.report_generator import (
    ReportGenerator,
    eval_report_path,
    run_label,
    save_eval_report,
)
from src.schemas.pipeline import PipelineConfig

ISMAP_DIR = "ismap"


class ArtifactLayout:
    """Where each role's artifacts live under the configured roots"""

    def __init__(self, config: PipelineConfig):
        self.paths = config.paths

    def tileset(self, role: str) -> Path:
        return self.paths.tilesets / role

    def transfer(self, model: str, zoom: int) -> Path:
        return self.paths.tilesets / f"transfer-{run_label(model, zoom)}"

    def checkpoint(self, model: str, zoom: int) -> Path:
        return self.paths.checkpoints / run_label(model, zoom)

    @property
    def ismap(self) -> Path:
        return self.paths.checkpoints / ISMAP_DIR

    def evaluation(self, model: str, zoom: int) -> Path:
        return eval_report_path(self.paths.reports, model, zoom)

    @property
    def reports(self) -> Path:
        return self.paths.reports


def require_checkpoint(directory: Path, what: str, hint: str) -> Path:
    if not checkpoint_exists(directory):
        raise PrerequisiteMissingError(what, directory, hint=hint)
    return directory


@dataclass
class PipelineResult:
    """Artifacts of a full run"""

    dataset: Optional[DatasetBuild] = None
    training: dict[str, TrainResult] = field(default_factory=dict)
    transfers: dict[str, DatasetManifest] = field(default_factory=dict)
    ismap: Optional[IsMapResult] = None
    evaluations: dict[str, EvalReport] = field(default_factory=dict)
    report_paths: tuple[Path, ...] = ()
    stages_completed: list[str] = field(default_factory=list)


class ExperimentPipeline:
    """Runs the stages of one configuration; every stage is usable on its own"""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.layout = ArtifactLayout(config)

    def _zooms(self, zoom: Optional[int]) -> list[int]:
        if zoom is None:
            return list(self.config.zooms)
        if zoom not in self.config.zooms:
            raise ConfigError(f"Zoom {zoom} is not configured (zooms: {self.config.zooms})")
        return [zoom]

    def tileset(self, role: str) -> DatasetManifest:
        return load_manifest(self.layout.tileset(role))

    def dataset(self) -> DatasetBuild:
        return build_datasets(self.config)

    def train(
        self,
        model: str,
        zoom: int,
        resume: bool = False,
        on_epoch: Optional[Callable[[EpochStats], None]] = None,
    ) -> TrainResult:
        cfg = self.config.train_config(model)
        self._zooms(zoom)
        simple, target = self.tileset("simple"), self.tileset("target")
        return train(
            model, simple, target, cfg, self.layout.checkpoint(model, zoom), zoom, resume, on_epoch
        )

    def transfer(self, model: str, zoom: int) -> DatasetManifest:
        ckpt = require_checkpoint(
            self.layout.checkpoint(model, zoom), f"{run_label(model, zoom)} checkpoint", "train"
        )
        return transfer(
            ckpt,
            self.tileset("simple"),
            self.layout.transfer(model, zoom),
            "test",
            zoom,
            png_copies=self.config.png_copies,
        )

    def train_ismap(
        self, on_epoch: Optional[Callable[[dict[str, float]], None]] = None
    ) -> IsMapResult:
        cfg = self.config.ismap
        maps, nonmaps = load_training_set(
            [self.tileset("simple"), self.tileset("target")], self.tileset("nonmap"), cfg
        )
        return train_ismap(maps, nonmaps, cfg, self.layout.ismap, on_epoch)

    def evaluate(self, model: str, zoom: int) -> EvalReport:
        require_checkpoint(self.layout.ismap, "IsMap classifier", "train-ismap")
        transfer_dir = self.layout.transfer(model, zoom)
        if not (transfer_dir / "manifest.json").is_file():
            raise PrerequisiteMissingError(
                f"{run_label(model, zoom)} transfer tileset", transfer_dir, hint="transfer"
            )
        clf = IsMapClassifier.from_checkpoint(self.layout.ismap)
        report = evaluate_tilesets(
            clf,
            load_manifest(transfer_dir),
            self.tileset("nonmap"),
            split="test",
            zoom=zoom,
            label=run_label(model, zoom),
        )
        save_eval_report(report, self.layout.evaluation(model, zoom))
        return report

    def report(self) -> tuple[Path, Path]:
        return ReportGenerator(self.layout.reports).generate()

    def run(
        self,
        models: Optional[list[str]] = None,
        zoom: Optional[int] = None,
        on_epoch: Optional[Callable[[str, EpochStats], None]] = None,
        on_ismap_epoch: Optional[Callable[[dict[str, float]], None]] = None,
    ) -> PipelineResult:
        """dataset -> train -> transfer -> train-ismap -> evaluate -> report

        on_epoch receives the run label ("pix2pix-z15") with each epoch's stats.
        """
        models = models or list(self.config.models)
        zooms = self._zooms(zoom)
        result = PipelineResult()
        logger.info(f"Starting pipeline: models={models} zooms={zooms}")

        result.dataset = self.dataset()
        result.stages_completed.append("dataset")

        for model in models:
            for z in zooms:
                label = run_label(model, z)
                callback = (lambda stats, lb=label: on_epoch(lb, stats)) if on_epoch else None
                result.training[label] = self.train(model, z, on_epoch=callback)
        result.stages_completed.append("train")

        for model in models:
            for z in zooms:
                result.transfers[run_label(model, z)] = self.transfer(model, z)
        result.stages_completed.append("transfer")

        result.ismap = self.train_ismap(on_ismap_epoch)
        result.stages_completed.append("train-ismap")

        for model in models:
            for z in zooms:
                result.evaluations[run_label(model, z)] = self.evaluate(model, z)
        result.stages_completed.append("evaluate")

        result.report_paths = self.report()
        result.stages_completed.append("report")
        logger.info(f"Pipeline complete: {len(result.evaluations)} evaluations")
        return result
