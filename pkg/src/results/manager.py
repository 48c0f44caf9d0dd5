"""
Results management for storing and retrieving station reports.

This module handles:
- Saving station reports to JSON files (one per station)
- Converting numpy values and non-finite floats to plain JSON
- Finding and loading recent reports
- Cleaning up old reports
"""

import os
import json
import math
import logging
from enum import Enum
from typing import Dict, Any, Optional, List

import numpy as np

from config import get_config

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """Plain JSON value: numpy scalars and arrays unwrapped, NaN and infinities as null"""
    if isinstance(value, dict):
        return {str(k.value if isinstance(k, Enum) else k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


class ResultsManager:
    """Manages station report storage and retrieval."""

    def __init__(self, out_dir: Optional[str] = None):
        """Initialize results manager.

        Args:
            out_dir: Directory for reports. If None, uses the configured default
                relative to the current working directory.
        """
        if out_dir is None:
            out_dir = get_config().results.DEFAULT_OUTPUT_DIR
        self.results_dir = os.path.abspath(out_dir)
        self.suffix = get_config().results.REPORT_SUFFIX

        # Ensure directory exists
        os.makedirs(self.results_dir, exist_ok=True)

    def report_path(self, station: str) -> str:
        return os.path.join(self.results_dir, f"{station}{self.suffix}")

    def save_report(self, report: Dict[str, Any]) -> str:
        """Save a station report as ``<station>_report.json``.

        Keys keep their construction order and no wall-clock time is
        written, so the same inputs and seed give byte-identical files.

        Args:
            report: Report dictionary with at least a ``station`` entry

        Returns:
            Path to the saved report file
        """
        filepath = self.report_path(report["station"])
        with open(filepath, 'w') as f:
            json.dump(to_jsonable(report), f, indent=2, allow_nan=False)
            f.write("\n")

        logger.info("Report saved to: %s", filepath)
        return filepath

    def load_report(self, station_or_path: str) -> Dict[str, Any]:
        """Load a report by station name or file path."""
        filepath = station_or_path
        if not os.path.exists(filepath):
            filepath = self.report_path(station_or_path)
        with open(filepath, 'r') as f:
            return json.load(f)

    def _report_files(self) -> List[str]:
        if not os.path.exists(self.results_dir):
            return []
        return [os.path.join(self.results_dir, f) for f in os.listdir(self.results_dir)
                if f.endswith(self.suffix)]

    def get_latest_report(self) -> Optional[Dict[str, Any]]:
        """Get the most recently written report.

        Returns:
            Dictionary containing the latest report, or None if no report is found
        """
        files = self._report_files()
        if not files:
            return None
        latest_file = max(files, key=os.path.getmtime)
        try:
            return self.load_report(latest_file)
        except (OSError, ValueError) as e:
            logger.error("Error loading report from %s: %s", latest_file, e)
            return None

    def list_reports(self, limit: Optional[int] = None) -> List[Dict[str, Any]]:
        """List reports sorted by station name.

        Args:
            limit: Maximum number of reports to return

        Returns:
            List of report dictionaries, each with a ``_filepath`` entry
        """
        all_reports = []
        for filepath in sorted(self._report_files()):
            try:
                report = self.load_report(filepath)
            except (OSError, ValueError) as e:
                logger.error("Error loading %s: %s", filepath, e)
                continue
            report['_filepath'] = filepath  # Add filepath for reference
            all_reports.append(report)

        if limit is not None:
            all_reports = all_reports[:limit]
        return all_reports

    def cleanup_old_reports(self, keep_count: Optional[int] = None) -> int:
        """Delete old report files, keeping only the most recent ones.

        Args:
            keep_count: Number of recent reports to keep

        Returns:
            Number of files deleted
        """
        if keep_count is None:
            keep_count = get_config().results.RESULTS_KEEP_COUNT

        # Sort by modification time (newest first)
        files = sorted(self._report_files(), key=os.path.getmtime, reverse=True)

        deleted_count = 0
        for filepath in files[keep_count:]:
            try:
                os.remove(filepath)
                deleted_count += 1
                logger.info("Deleted old report: %s", filepath)
            except OSError as e:
                logger.error("Error deleting %s: %s", filepath, e)
        return deleted_count
