"""
IsMap commands - train the map / non-map classifier and evaluate transfer tiles
"""

from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from src.cli.common import (
    ConfigOption,
    ModelOption,
    ZoomOption,
    console,
    handle_errors,
    print_ismap_epoch,
    resolve_config,
    selected_models,
    selected_zooms,
    with_root,
)
from src.ismap.metrics import METRIC_NAMES
from src.pipeline.runner import ExperimentPipeline
from src.report.report_generator import run_label


@handle_errors
def train_ismap(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Checkpoints root override"),
):
    """
    Train IsMap on styled map tiles vs procedural textures

    Example:
        cartogan train-ismap --config cartogan.json
    """
    cfg = with_root(resolve_config(config), "checkpoints", out)
    result = ExperimentPipeline(cfg).train_ismap(on_epoch=print_ismap_epoch)
    if result.heldout_accuracy is not None:
        console.print(f"Held-out accuracy: [bold]{result.heldout_accuracy:.3f}[/bold]")
    console.print(f"✓ Classifier: [bold]{result.checkpoint_dir}[/bold]")


@handle_errors
def evaluate(
    config: Optional[Path] = ConfigOption,
    model: Optional[str] = ModelOption,
    zoom: Optional[int] = ZoomOption,
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Reports root override"),
):
    """
    Classify transfer tiles with IsMap; writes eval-<model>-z<zoom>.json

    Example:
        cartogan evaluate --config cartogan.json --model cyclegan
    """
    cfg = with_root(resolve_config(config), "reports", out)
    pipeline = ExperimentPipeline(cfg)
    table = Table(title="IsMap evaluation")
    table.add_column("Run")
    for name in METRIC_NAMES:
        table.add_column(name, justify="right")
    for name in selected_models(cfg, model):
        for z in selected_zooms(cfg, zoom):
            report = pipeline.evaluate(name, z)
            table.add_row(run_label(name, z), *(f"{v:.3f}" for v in report.as_row().values()))
    console.print(table)
    console.print(f"✓ Reports in [bold]{pipeline.layout.reports}[/bold]")
