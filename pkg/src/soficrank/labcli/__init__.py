"""Experiment configuration, runners, reports and the command line."""
from .config import ExperimentConfig, canonical_json, config_hash, dumps, load_config, parse_config, serialize
from .report import emit_report, load_record, results_csv, summary_text
from .runner import (RunRecord, run, run_convergence, run_modp_sweep, run_moments, run_semicontinuity,
                     run_twisted_check)

__all__ = [
    "ExperimentConfig", "RunRecord", "canonical_json", "config_hash", "dumps", "emit_report",
    "load_config", "load_record", "parse_config", "results_csv", "run", "run_convergence",
    "run_modp_sweep", "run_moments", "run_semicontinuity", "run_twisted_check", "serialize",
    "summary_text",
]
