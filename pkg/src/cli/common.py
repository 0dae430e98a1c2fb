"""
Helpers shared by the CLI commands
"""

import functools
from pathlib import Path
from typing import Callable, Optional

import typer
from loguru import logger
from rich.console import Console
from rich.markup import escape

from src.core.config import get_settings
from src.core.exceptions import CartoganException, ConfigError
from src.gan.trainer import EpochStats
from src.schemas.pipeline import PipelineConfig, load_config

# stdout; progress lines must not wrap
console = Console(soft_wrap=True)

DEFAULT_CONFIG_NAME = "cartogan.json"

ConfigOption = typer.Option(
    None, "--config", "-c", help="Experiment config (default: $CARTOGAN_DEFAULT_CONFIG)"
)
ModelOption = typer.Option(None, "--model", "-m", help="pix2pix or cyclegan (default: all)")
ZoomOption = typer.Option(None, "--zoom", "-z", help="Zoom level (default: all configured)")


def resolve_config(path: Optional[Path]) -> PipelineConfig:
    """--config, else CARTOGAN_DEFAULT_CONFIG, else ./cartogan.json"""
    candidate = path or get_settings().default_config
    if candidate is None and Path(DEFAULT_CONFIG_NAME).is_file():
        candidate = Path(DEFAULT_CONFIG_NAME)
    if candidate is None:
        raise ConfigError(
            f"No config given and no ./{DEFAULT_CONFIG_NAME}; "
            "pass --config or run `cartogan init-config`"
        )
    return load_config(candidate)


def selected_models(config: PipelineConfig, model: Optional[str]) -> list[str]:
    if model is None:
        return list(config.models)
    config.train_config(model)
    return [model]


def selected_zooms(config: PipelineConfig, zoom: Optional[int]) -> list[int]:
    if zoom is None:
        return list(config.zooms)
    if zoom not in config.zooms:
        raise ConfigError(f"Zoom {zoom} is not configured (zooms: {config.zooms})")
    return [zoom]


def with_root(config: PipelineConfig, root: str, out: Optional[Path]) -> PipelineConfig:
    """Copy of config with one artifact root replaced by --out"""
    if out is None:
        return config
    return config.model_copy(update={"paths": config.paths.model_copy(update={root: out})})


def print_epoch(stats: EpochStats):
    console.print(stats.progress_line(), markup=False, highlight=False)


def print_ismap_epoch(row: dict[str, float]):
    line = f"epoch={int(row['epoch'])} loss={row['loss']:.6f}"
    if "heldout_accuracy" in row:
        line += f" heldout_accuracy={row['heldout_accuracy']:.6f}"
    console.print(line, markup=False, highlight=False)


def handle_errors(command: Callable) -> Callable:
    """Print `Error: <message>` and exit 1 instead of a traceback"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except typer.Exit:
            raise
        except CartoganException as e:
            logger.debug(f"{command.__name__} failed: {e!r}")
            console.print(f"[bold red]Error:[/bold red] {escape(str(e))}")
            raise typer.Exit(1)
        except Exception as e:
            logger.exception(f"Unexpected failure in {command.__name__}")
            console.print(f"[bold red]Error:[/bold red] {escape(f'{type(e).__name__}: {e}')}")
            raise typer.Exit(1)

    return wrapper
