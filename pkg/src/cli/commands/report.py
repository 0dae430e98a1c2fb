"""
Report command - comparison table over every evaluation
"""

from pathlib import Path
from typing import Optional

import typer

from src.cli.common import ConfigOption, console, handle_errors, resolve_config
from src.report.report_generator import ReportGenerator


@handle_errors
def report(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory override"),
):
    """
    Write comparison.md and comparison.txt from the eval-*.json reports

    Example:
        cartogan report --config cartogan.json
    """
    cfg = resolve_config(config)
    md_path, txt_path = ReportGenerator(cfg.paths.reports).generate(out)
    console.print(txt_path.read_text(encoding="utf-8"), markup=False, highlight=False)
    console.print(f"✓ Saved to: [bold]{md_path}[/bold]")
