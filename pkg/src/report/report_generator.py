"""
Report generator - comparison of evaluation runs across models and zoom levels

Each `cartogan evaluate` run leaves eval-<model>-z<zoom>.json in the reports
directory. The comparison table has one column per (model, zoom) run, ordered
pix2pix before cyclegan and by zoom within a model, and one row per metric.
"""

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from loguru import logger
from pydantic import ValidationError

from src.core.exceptions import PrerequisiteMissingError
from src.gan.trainer import MODEL_KINDS
from src.ismap.metrics import METRIC_NAMES, EvalReport

EVAL_PREFIX = "eval-"
COMPARISON_MD = "comparison.md"
COMPARISON_TXT = "comparison.txt"

_LABEL = re.compile(r"^(?P<model>[a-z0-9]+)-z(?P<zoom>\d+)$")


def run_label(model: str, zoom: int) -> str:
    return f"{model}-z{zoom}"


def eval_report_path(reports_dir: Union[str, Path], model: str, zoom: int) -> Path:
    return Path(reports_dir) / f"{EVAL_PREFIX}{run_label(model, zoom)}.json"


def save_eval_report(report: EvalReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


@dataclass(frozen=True)
class RunColumn:
    model: str
    zoom: int
    report: EvalReport

    @property
    def header(self) -> str:
        return f"{self.model} z{self.zoom}"

    def sort_key(self) -> tuple[int, int]:
        rank = MODEL_KINDS.index(self.model) if self.model in MODEL_KINDS else len(MODEL_KINDS)
        return rank, self.zoom


@dataclass
class DirectionalCheck:
    """Informational: does the unpaired model score at least the paired one at this zoom?"""

    zoom: int
    pix2pix_f1: float
    cyclegan_f1: float

    @property
    def holds(self) -> bool:
        return self.cyclegan_f1 >= self.pix2pix_f1


@dataclass
class ComparisonTable:
    columns: list[RunColumn]
    checks: list[DirectionalCheck] = field(default_factory=list)

    def value(self, column: RunColumn, metric: str) -> str:
        text = f"{getattr(column.report, metric):.3f}"
        return text + "*" if metric in column.report.undefined else text

    def rows(self) -> list[list[str]]:
        return [
            [metric.capitalize() if metric != "f1" else "F1"]
            + [self.value(c, metric) for c in self.columns]
            for metric in METRIC_NAMES
        ]

    @property
    def has_undefined(self) -> bool:
        return any(c.report.undefined for c in self.columns)


def load_runs(reports_dir: Union[str, Path]) -> list[RunColumn]:
    """Every eval-<model>-z<zoom>.json in reports_dir, sorted for the table"""
    columns = []
    for path in sorted(Path(reports_dir).glob(f"{EVAL_PREFIX}*.json")):
        try:
            report = EvalReport.model_validate(json.loads(path.read_text(encoding="utf-8")))
        except (json.JSONDecodeError, ValidationError) as e:
            logger.warning(f"Skipping unreadable evaluation {path}: {e.__class__.__name__}")
            continue
        match = _LABEL.match(path.stem[len(EVAL_PREFIX) :])
        if match is None:
            logger.warning(f"Skipping {path}: name is not eval-<model>-z<zoom>.json")
            continue
        columns.append(RunColumn(match["model"], int(match["zoom"]), report))
    return sorted(columns, key=RunColumn.sort_key)


def directional_checks(columns: list[RunColumn]) -> list[DirectionalCheck]:
    by_run = {(c.model, c.zoom): c.report for c in columns}
    checks = []
    for zoom in sorted({c.zoom for c in columns}):
        paired, unpaired = by_run.get(("pix2pix", zoom)), by_run.get(("cyclegan", zoom))
        if paired is not None and unpaired is not None:
            checks.append(DirectionalCheck(zoom, paired.f1, unpaired.f1))
    return checks


def build_table(columns: list[RunColumn]) -> ComparisonTable:
    return ComparisonTable(columns, directional_checks(columns))


def render_text(table: ComparisonTable) -> str:
    header = ["Metric"] + [c.header for c in table.columns]
    grid = [header] + table.rows()
    widths = [max(len(row[i]) for row in grid) for i in range(len(header))]

    def line(row: list[str]) -> str:
        first = row[0].ljust(widths[0])
        rest = [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
        return "  ".join([first] + rest).rstrip()

    lines = [line(header), "  ".join("-" * w for w in widths)]
    lines += [line(row) for row in table.rows()]
    lines += _footer(table)
    return "\n".join(lines) + "\n"


def render_markdown(table: ComparisonTable) -> str:
    header = ["Metric"] + [c.header for c in table.columns]
    lines = [
        "# IsMap evaluation of transfer tiles",
        "",
        "| " + " | ".join(header) + " |",
        "|" + "|".join([" --- "] + [" ---: "] * len(table.columns)) + "|",
    ]
    lines += ["| " + " | ".join(row) + " |" for row in table.rows()]
    footer = _footer(table)
    if footer:
        lines += [""] + [f"- {note.strip()}" for note in footer if note.strip()]
    return "\n".join(lines) + "\n"


def _footer(table: ComparisonTable) -> list[str]:
    notes = []
    if table.has_undefined:
        notes.append("Values marked * had a zero denominator and are reported as 0")
    for check in table.checks:
        verdict = "holds" if check.holds else "does not hold"
        notes.append(
            f"z{check.zoom}: cyclegan F1 {check.cyclegan_f1:.3f} vs pix2pix "
            f"F1 {check.pix2pix_f1:.3f}, unpaired >= paired {verdict} (informational)"
        )
    return [""] + notes if notes else []


class ReportGenerator:
    """Writes the comparison table over all evaluations in a reports directory"""

    def __init__(self, reports_dir: Union[str, Path]):
        self.reports_dir = Path(reports_dir)

    def table(self) -> ComparisonTable:
        """
        Raises:
            PrerequisiteMissingError: No evaluation reports yet
        """
        columns = load_runs(self.reports_dir)
        if not columns:
            raise PrerequisiteMissingError(
                "evaluation reports", self.reports_dir / f"{EVAL_PREFIX}*.json", hint="evaluate"
            )
        return build_table(columns)

    def generate(self, out_dir: Optional[Union[str, Path]] = None) -> tuple[Path, Path]:
        """Write comparison.md and comparison.txt; returns their paths"""
        table = self.table()
        out = Path(out_dir) if out_dir else self.reports_dir
        out.mkdir(parents=True, exist_ok=True)
        md_path = out / COMPARISON_MD
        txt_path = out / COMPARISON_TXT
        md_path.write_text(render_markdown(table), encoding="utf-8")
        txt_path.write_text(render_text(table), encoding="utf-8")
        for check in table.checks:
            if not check.holds:
                logger.info(f"At z{check.zoom} pix2pix scored above cyclegan (informational)")
        logger.info(f"Report saved: {md_path} ({len(table.columns)} runs)")
        return md_path, txt_path
