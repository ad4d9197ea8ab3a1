"""
Base experiment class - Foundation for all laboratory pipelines

Every pipeline behind a CLI command inherits from BaseExperiment and fills
in setup / run_experiment / cleanup.
"""

import logging
import time
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

from ..core.config import ExperimentConfig
from ..core.models import ExperimentResult

logger = logging.getLogger(__name__)


class BaseExperiment(ABC):
    """Base class for all experiments"""

    name: str = "experiment"
    columns: List[str] = []

    def __init__(self, config: ExperimentConfig, progress: Optional[Any] = None):
        self.config = config
        self.progress = progress
        self.metadata: Dict[str, Any] = {}
        self.error: Optional[BaseException] = None

    def setup(self) -> bool:
        """Prepare data and models. Return True if successful."""
        return True

    @abstractmethod
    def run_experiment(self) -> Dict[str, Any]:
        """Run the pipeline. Return {"rows": [...], "summary": {...}}."""
        pass

    def cleanup(self):
        """Release whatever setup acquired."""
        pass

    def execute(self) -> ExperimentResult:
        """Execute the complete experiment workflow"""
        start_time = time.time()
        success = False
        error_message = None
        results: Dict[str, Any] = {}

        try:
            if not self.setup():
                raise RuntimeError(f"Experiment {self.name} setup failed")
            results = self.run_experiment()
            success = True

        except Exception as e:
            logger.error(f"Experiment {self.name} failed: {e}")
            error_message = str(e)
            self.error = e

        finally:
            try:
                self.cleanup()
            except Exception as e:
                logger.warning(f"Cleanup failed for {self.name}: {e}")

        duration = time.time() - start_time

        return ExperimentResult(
            experiment_name=self.name,
            duration=duration,
            success=success,
            error_message=error_message,
            columns=list(results.get("columns", self.columns)),
            rows=results.get("rows", []),
            summary=results.get("summary", {}),
            metadata={**self.metadata, "config": self.config.model_dump(mode="json", exclude_none=True)},
        )

    def tick(self, *_):
        """Advance the attached progress reporter, if any"""
        if self.progress is not None:
            self.progress()
