"""Benchmark environments, planner loops and evaluation harness for information seeking under perturbed dynamics."""

from .envs import TaskSpec, make_env

__all__ = ["TaskSpec", "make_env"]
__version__ = "0.1.0"
