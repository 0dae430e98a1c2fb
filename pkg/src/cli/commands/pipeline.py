"""
Pipeline commands - run every stage, or write a starting config
"""

from pathlib import Path
from typing import Optional

import typer

from src.cli.common import (
    DEFAULT_CONFIG_NAME,
    ConfigOption,
    ModelOption,
    ZoomOption,
    console,
    handle_errors,
    print_epoch,
    print_ismap_epoch,
    resolve_config,
    selected_models,
)
from src.gan.trainer import EpochStats
from src.pipeline.runner import ExperimentPipeline
from src.schemas.pipeline import default_config, save_config


@handle_errors
def pipeline(
    config: Optional[Path] = ConfigOption,
    model: Optional[str] = ModelOption,
    zoom: Optional[int] = ZoomOption,
):
    """
    dataset -> train -> transfer -> train-ismap -> evaluate -> report

    Example:
        cartogan pipeline --config cartogan.json
    """
    cfg = resolve_config(config)
    current = {"label": None}

    def on_epoch(label: str, stats: EpochStats):
        if current["label"] != label:
            console.print(f"[bold blue]Training {label}[/bold blue]")
            current["label"] = label
        print_epoch(stats)

    result = ExperimentPipeline(cfg).run(
        selected_models(cfg, model), zoom, on_epoch=on_epoch, on_ismap_epoch=print_ismap_epoch
    )
    console.print(result.report_paths[1].read_text(encoding="utf-8"), markup=False)
    stages = ", ".join(result.stages_completed)
    console.print(f"[bold green]✓ Pipeline complete:[/bold green] {stages}")


@handle_errors
def init_config(
    path: Path = typer.Argument(Path(DEFAULT_CONFIG_NAME), help="Where to write the config"),
    force: bool = typer.Option(False, "--force", "-f", help="Overwrite an existing file"),
):
    """
    Write the default desk-scale configuration

    Example:
        cartogan init-config cartogan.json
    """
    if path.exists() and not force:
        console.print(f"[bold red]Error:[/bold red] {path} exists (use --force to overwrite)")
        raise typer.Exit(1)
    save_config(default_config(), path)
    console.print(f"✓ Wrote [bold]{path}[/bold]")
