"""
JSON Exporter - Export experiment results in JSON format
"""

import json
import logging
from datetime import datetime
from pathlib import Path

import numpy as np

from ..core.models import ExperimentResult

logger = logging.getLogger(__name__)


class JSONExporter:
    """JSON exporter for experiment results"""

    def __init__(self, include_timing: bool = False):
        self.include_timing = include_timing

    def export_result(self, result: ExperimentResult) -> str:
        """Export a full result; timing fields are dropped unless requested"""
        exclude = None if self.include_timing else {"timestamp", "duration"}
        data = result.model_dump(mode="json", exclude=exclude)
        return json.dumps(data, indent=2, default=self._json_serializer)

    def _json_serializer(self, obj):
        """Custom JSON serializer for non-standard types"""
        if isinstance(obj, datetime):
            return obj.isoformat()
        elif isinstance(obj, np.ndarray):
            return obj.tolist()
        elif isinstance(obj, np.generic):
            return obj.item()
        elif isinstance(obj, Path):
            return str(obj)
        elif hasattr(obj, "model_dump"):
            return obj.model_dump()
        else:
            return str(obj)
