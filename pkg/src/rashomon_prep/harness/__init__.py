"""Configuration-driven experiment grid and reports."""

from .config import DatasetEntry, ExperimentConfig, config_from_dict, parse_config
from .report import load_store, make_report
from .runner import (METRIC_FIELDS, RESULTS_FILE, Cell, RunSummary, grid_cells, load_jsonl,
                     metric_view, run_cell, run_experiment)

__all__ = [
    "DatasetEntry", "ExperimentConfig", "config_from_dict", "parse_config", "load_store",
    "make_report", "METRIC_FIELDS", "RESULTS_FILE", "Cell", "RunSummary", "grid_cells",
    "load_jsonl", "metric_view", "run_cell", "run_experiment",
]
