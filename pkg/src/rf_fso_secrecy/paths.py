"""Path management for result artifacts."""

from pathlib import Path
from typing import Optional
from datetime import datetime
from .settings import settings

class PathBuilder:
    """Build paths for result artifacts."""

    def __init__(self, results_dir: Optional[Path] = None):
        self.results_dir = results_dir or settings.results_dir
        self.figures_dir = settings.figures.out_dir
        self.logs_dir = settings.logs_dir

    def get_figure_dir(self, fig_id: int, out_dir: Optional[Path] = None) -> Path:
        """Get directory for one figure's curve files."""
        figure_dir = (out_dir or self.figures_dir) / f"fig{fig_id:02d}"
        figure_dir.mkdir(parents=True, exist_ok=True)
        return figure_dir

    def get_curve_path(self, figure_dir: Path, label: str) -> Path:
        """Get CSV path for one curve."""
        return figure_dir / f"{label}.csv"

    def get_manifest_path(self, figure_dir: Path) -> Path:
        """Get path for a figure manifest."""
        return figure_dir / "manifest.json"

    def get_log_path(self, log_name: str) -> Path:
        """Get path for a log file."""
        date_str = datetime.now().strftime("%Y%m%d")
        return self.logs_dir / f"{log_name}_{date_str}.log"

path_builder = PathBuilder()
