"""Experiment orchestration"""

from .runner import STAGES, Combination, ExperimentRunner, LoadedFit

__all__ = ["ExperimentRunner", "Combination", "LoadedFit", "STAGES"]
