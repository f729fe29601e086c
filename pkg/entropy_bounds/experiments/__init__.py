"""Experiment configs, the trial runner, the registry and record export.

The registry is imported explicitly (``entropy_bounds.experiments.registry``)
so that the learning modules can use the runner without a cycle.
"""

from entropy_bounds.experiments.runner import ExperimentResult, TrialRunner

__all__ = ["ExperimentResult", "TrialRunner"]
