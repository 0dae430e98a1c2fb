"""
Train and transfer commands - GAN models per (model, zoom)
"""

from pathlib import Path
from typing import Optional

import typer

from src.cli.common import (
    ConfigOption,
    ModelOption,
    ZoomOption,
    console,
    handle_errors,
    print_epoch,
    resolve_config,
    selected_models,
    selected_zooms,
    with_root,
)
from src.gan.transfer import transfer as transfer_tiles
from src.pipeline.runner import ExperimentPipeline, require_checkpoint
from src.report.report_generator import run_label


@handle_errors
def train(
    config: Optional[Path] = ConfigOption,
    model: Optional[str] = ModelOption,
    zoom: Optional[int] = ZoomOption,
    resume: bool = typer.Option(False, "--resume", help="Continue from the last checkpoint"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Checkpoints root override"),
):
    """
    Train GAN models; prints `epoch=<k> loss_g=<v> loss_d=<v>` per epoch

    Example:
        cartogan train --config cartogan.json --model cyclegan --zoom 18
    """
    cfg = with_root(resolve_config(config), "checkpoints", out)
    pipeline = ExperimentPipeline(cfg)
    for name in selected_models(cfg, model):
        for z in selected_zooms(cfg, zoom):
            console.print(f"[bold blue]Training {run_label(name, z)}[/bold blue]")
            result = pipeline.train(name, z, resume=resume, on_epoch=print_epoch)
            console.print(
                f"✓ {result.steps} steps, checkpoint: [bold]{result.checkpoint_dir}[/bold]"
            )


@handle_errors
def transfer(
    config: Optional[Path] = ConfigOption,
    model: Optional[str] = ModelOption,
    zoom: Optional[int] = ZoomOption,
    out: Optional[Path] = typer.Option(
        None, "--out", "-o", help="Output tileset (one model and zoom only)"
    ),
):
    """
    Apply trained generators to the simple test tiles

    Example:
        cartogan transfer --config cartogan.json --model pix2pix --zoom 15
    """
    cfg = resolve_config(config)
    pipeline = ExperimentPipeline(cfg)
    runs = [(m, z) for m in selected_models(cfg, model) for z in selected_zooms(cfg, zoom)]
    if out is not None and len(runs) != 1:
        console.print("[bold red]Error:[/bold red] --out needs a single --model and --zoom")
        raise typer.Exit(1)
    for name, z in runs:
        if out is None:
            manifest = pipeline.transfer(name, z)
        else:
            ckpt = require_checkpoint(
                pipeline.layout.checkpoint(name, z), f"{run_label(name, z)} checkpoint", "train"
            )
            manifest = transfer_tiles(
                ckpt, pipeline.tileset("simple"), out, "test", z, png_copies=cfg.png_copies
            )
        console.print(f"✓ {run_label(name, z)}: {len(manifest)} tiles -> {manifest.root}")
