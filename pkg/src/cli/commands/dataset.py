"""
Dataset commands - build the tilesets, or ingest an existing tile tree
"""

from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from src.cli.common import ConfigOption, console, handle_errors, resolve_config, with_root
from src.datasets.ingest import ingest_directory
from src.pipeline.runner import ExperimentPipeline


@handle_errors
def dataset(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Tilesets root override"),
):
    """
    Generate the scene and render the simple, target and non-map tilesets

    Example:
        cartogan dataset --config cartogan.json
    """
    cfg = with_root(resolve_config(config), "tilesets", out)
    console.print(f"[bold blue]Building datasets under[/bold blue] {cfg.paths.tilesets}")
    build = ExperimentPipeline(cfg).dataset()

    table = Table(title="Tilesets")
    table.add_column("Role")
    table.add_column("Tiles", justify="right")
    table.add_column("Test", justify="right")
    for manifest in (build.simple, build.target, build.nonmap):
        n_test = len(manifest.select("test"))
        table.add_row(manifest.role, str(len(manifest)), str(n_test))
    console.print(table)
    console.print(f"✓ Scene: [bold]{build.scene_path}[/bold]")


@handle_errors
def ingest(
    directory: Path = typer.Argument(..., help="Tile tree in z/x/y.<png|ppm> layout"),
    role: str = typer.Option("target", "--role", "-r", help="simple, target, transfer or nonmap"),
    seed: int = typer.Option(0, "--seed", help="Split seed"),
    test_fraction: float = typer.Option(0.2, "--test-fraction", help="Share of tiles held out"),
):
    """
    Write a manifest for an existing tile tree

    Example:
        cartogan ingest data/osm_tiles --role target
    """
    if role not in ("simple", "target", "transfer", "nonmap"):
        console.print(f"[bold red]Error:[/bold red] Unknown role {role!r}")
        raise typer.Exit(1)
    result = ingest_directory(directory, role, seed, test_fraction)
    for reject in result.rejects:
        console.print(f"[yellow]⚠ skipped[/yellow] {reject.path}: {reject.reason}")
    console.print(
        f"✓ Ingested [bold]{len(result.manifest)}[/bold] tiles "
        f"({len(result.rejects)} rejected) into {directory / 'manifest.json'}"
    )
