"""Comparison reports over evaluation runs"""

from src.report.report_generator import (
    ComparisonTable,
    DirectionalCheck,
    ReportGenerator,
    RunColumn,
    build_table,
    eval_report_path,
    load_runs,
    render_markdown,
    render_text,
    run_label,
    save_eval_report,
)

__all__ = [
    "ComparisonTable",
    "DirectionalCheck",
    "ReportGenerator",
    "RunColumn",
    "build_table",
    "eval_report_path",
    "load_runs",
    "render_markdown",
    "render_text",
    "run_label",
    "save_eval_report",
]
