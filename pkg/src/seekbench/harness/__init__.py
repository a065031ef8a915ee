"""Experiment runner, metrics and command line interface."""

from __future__ import annotations

from .classify import classify_failure, rule_category
from .config import ConfigError, ExperimentConfig, MethodEntry, TaskEntry, load_config, parse_config
from .records import FailureCategory, RunRecord, curve, load_records, success_rate, write_reports
from .runner import enumerate_trials, run_experiment, run_trial

__all__ = [
    "ConfigError", "ExperimentConfig", "FailureCategory", "MethodEntry", "RunRecord", "TaskEntry",
    "classify_failure", "curve", "enumerate_trials", "load_config", "load_records", "parse_config",
    "rule_category", "run_experiment", "run_trial", "success_rate", "write_reports",
]
