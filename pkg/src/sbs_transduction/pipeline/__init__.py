"""Scenario engine: configuration, end-to-end runs, sweeps and reports."""

from .engine import run_scenario, run_sweep
from .report import (
    CSV_COLUMNS,
    REPORT_SCHEMA,
    SWEEP_SCHEMA,
    SweepRow,
    SweepTable,
    TransductionReport,
    parse_report_json,
    render,
)
from .scenario import Scenario, load_scenario, parse_scenario

__all__ = [
    "CSV_COLUMNS",
    "REPORT_SCHEMA",
    "SWEEP_SCHEMA",
    "Scenario",
    "SweepRow",
    "SweepTable",
    "TransductionReport",
    "builtin_scenario",
    "load_scenario",
    "parse_scenario",
    "parse_report_json",
    "render",
    "run_scenario",
    "run_sweep",
]


def builtin_scenario(name="design"):
    """Path of a scenario file shipped with the package."""
    from importlib import resources

    p = resources.files("sbs_transduction").joinpath(f"data/scenarios/{name}.yaml")
    if not p.is_file():
        from ..errors import ValidationError
        raise ValidationError("scenario", f"no built-in scenario {name!r}")
    return str(p)
