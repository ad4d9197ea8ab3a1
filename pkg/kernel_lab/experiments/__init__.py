"""
Experiments module - Timed, failure-capturing pipelines behind the CLI commands
"""

from .runner import ExperimentRunner
from .base import BaseExperiment

__all__ = ["ExperimentRunner", "BaseExperiment"]
