"""
Serve command - read-only HTTP access to a tileset
"""

from pathlib import Path
from typing import Optional

import typer

from src.api.main import serve as run_server
from src.cli.common import ConfigOption, console, handle_errors, resolve_config


@handle_errors
def serve(
    root: Optional[Path] = typer.Option(
        None, "--root", "-r", help="Tileset directory (default: the configured target tileset)"
    ),
    config: Optional[Path] = ConfigOption,
    port: int = typer.Option(8080, "--port", "-p"),
    host: str = typer.Option("127.0.0.1", "--host"),
):
    """
    Serve /tiles/{z}/{x}/{y}.{ext} and /manifest.json for one tileset

    Example:
        cartogan serve --root artifacts/tilesets/transfer-cyclegan-z18 --port 8080
    """
    if root is None:
        root = resolve_config(config).paths.tilesets / "target"
    console.print(f"[bold blue]Serving[/bold blue] {root} on http://{host}:{port}/tiles/")
    run_server(root, port, host)
