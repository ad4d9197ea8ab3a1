"""
Experiment Runner - Registry and dispatch of laboratory pipelines
"""

import logging
from typing import Any, Dict, List, Optional, Type

from .base import BaseExperiment
from .pipelines import (
    FitPredictExperiment,
    HardInstanceExperiment,
    KernelCheckExperiment,
    RateStudyExperiment,
    SmoothnessExperiment,
)
from ..core.config import ExperimentConfig
from ..core.models import ExperimentResult

logger = logging.getLogger(__name__)


class ExperimentRunner:
    """Manages and executes experiments"""

    def __init__(self):
        self.available_experiments: Dict[str, Type[BaseExperiment]] = {
            "estimate-smoothness": SmoothnessExperiment,
            "rate-study": RateStudyExperiment,
            "fit-predict": FitPredictExperiment,
            "kernel-check": KernelCheckExperiment,
            "hard-instance": HardInstanceExperiment,
        }

    def list_available_experiments(self) -> List[str]:
        """Get list of available experiment names"""
        return list(self.available_experiments.keys())

    def create(self, config: ExperimentConfig, progress: Optional[Any] = None) -> BaseExperiment:
        if config.command not in self.available_experiments:
            raise ValueError(f"Unknown experiment: {config.command}. Available: {self.list_available_experiments()}")
        return self.available_experiments[config.command](config, progress)

    def run_experiment(self, config: ExperimentConfig, progress: Optional[Any] = None) -> ExperimentResult:
        """Run the experiment named by config.command"""
        experiment = self.create(config, progress)

        logger.info(f"Running experiment '{config.command}' with seed {config.seed}")
        result = experiment.execute()

        if result.success:
            logger.info(f"Experiment '{config.command}' completed in {result.duration:.2f}s")
        else:
            logger.warning(f"Experiment '{config.command}' failed: {result.error_message}")

        return result

    def get_experiment_info(self, name: str) -> Optional[Dict[str, str]]:
        """Get information about a specific experiment"""
        if name not in self.available_experiments:
            return None

        experiment_class = self.available_experiments[name]
        return {
            "name": name,
            "class": experiment_class.__name__,
            "description": (experiment_class.__doc__ or "No description available").strip(),
        }
