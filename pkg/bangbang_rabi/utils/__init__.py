"""File formats: run records, CSV data, schedule files and text summaries."""

from .records import RunRecord, read_csv, write_csv
from .schedule_file import load_schedule, parse_schedule
from .template_renderer import TemplateRenderer, render_summary

__all__ = [
    "RunRecord",
    "read_csv",
    "write_csv",
    "load_schedule",
    "parse_schedule",
    "TemplateRenderer",
    "render_summary",
]
