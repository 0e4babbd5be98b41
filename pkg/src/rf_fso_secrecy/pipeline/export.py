"""Export utilities for result rows and figure manifests."""

import sys
from pathlib import Path
from typing import Iterable, Optional, TextIO

from ..logging import get_logger
from ..models import ResultRow
from ..storage import format_csv, write_csv, write_json, write_text

logger = get_logger(__name__)

class ResultExporter:
    """Export ResultRows as CSV and run manifests as JSON."""

    @staticmethod
    def export_csv(rows: Iterable[ResultRow], output_path: Path) -> None:
        """Write rows to a CSV file."""
        logger.info(f"Exporting CSV: {output_path}")
        rows = list(rows)
        write_text(format_csv(rows), output_path)
        logger.info(f"CSV export completed: {output_path} ({len(rows)} rows)")

    @staticmethod
    def stream_csv(rows: Iterable[ResultRow], stream: Optional[TextIO] = None) -> None:
        """Write rows to standard output (or the given stream)."""
        write_csv(rows, stream or sys.stdout)

    @staticmethod
    def export_manifest(manifest: dict, output_path: Path) -> None:
        """Write a run manifest."""
        logger.info(f"Exporting manifest: {output_path}")
        write_json(manifest, output_path)
