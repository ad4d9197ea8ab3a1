"""
Exporters module - Data export functionality

- CSV format for tabular results with footer summaries
- JSON format for structured results
"""

from .json_exporter import JSONExporter
from .csv_exporter import CSVExporter

__all__ = ["JSONExporter", "CSVExporter"]
