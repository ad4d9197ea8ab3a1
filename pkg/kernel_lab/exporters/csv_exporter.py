"""
CSV Exporter - Export experiment tables in CSV format

Floats are written with 17 significant digits so values re-parse exactly.
Summary values follow the table as `key,value` footer rows.
"""

import csv
import io
import logging
from typing import Any, Dict, Iterable, List, Mapping, Optional

import numpy as np

from ..core.models import ExperimentResult

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "{:.17g}"


def format_value(value: Any) -> str:
    """Render one cell; None becomes an empty field"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT.format(float(value))
    return str(value)


class CSVExporter:
    """CSV exporter for experiment results"""

    def __init__(self, lineterminator: str = "\n"):
        self.lineterminator = lineterminator

    def export_rows(
        self,
        rows: Iterable[Mapping[str, Any]],
        columns: List[str],
        footer: Optional[Dict[str, Any]] = None,
    ) -> str:
        """Header row, one line per row, then `key,value` footer lines"""
        output = io.StringIO()
        writer = csv.writer(output, lineterminator=self.lineterminator)
        writer.writerow(columns)

        count = 0
        for row in rows:
            missing = [c for c in columns if c not in row]
            if missing:
                logger.warning(f"Row {count} lacks columns {missing}; writing empty fields")
            writer.writerow([format_value(row.get(column)) for column in columns])
            count += 1

        for key, value in (footer or {}).items():
            writer.writerow([key, format_value(value)])

        logger.debug(f"Exported {count} rows and {len(footer or {})} footer entries")
        return output.getvalue()

    def export_result(self, result: ExperimentResult) -> str:
        """Export an experiment's table and summary"""
        return self.export_rows(result.rows, result.columns, result.summary)
