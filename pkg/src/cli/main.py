"""
CLI application using Typer
"""

import typer

from src.cli.commands import dataset, ismap, pipeline, report, serve, train
from src.cli.common import console
from src.core.logging import setup_logging

app = typer.Typer(
    name="cartogan",
    help="cartogan - map style transfer with GANs, judged by a map / non-map classifier",
    add_completion=False,
)

app.command("dataset")(dataset.dataset)
app.command("ingest")(dataset.ingest)
app.command("train")(train.train)
app.command("transfer")(train.transfer)
app.command("train-ismap")(ismap.train_ismap)
app.command("evaluate")(ismap.evaluate)
app.command("report")(report.report)
app.command("serve")(serve.serve)
app.command("pipeline")(pipeline.pipeline)
app.command("init-config")(pipeline.init_config)


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log DEBUG to the console"),
):
    """Configure logging before any command runs"""
    setup_logging("DEBUG" if verbose else None)


@app.command()
def version():
    """Show version"""
    console.print("[bold green]cartogan v0.1.0[/bold green]")


if __name__ == "__main__":
    app()
