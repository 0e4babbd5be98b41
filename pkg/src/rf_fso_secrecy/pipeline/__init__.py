"""Sweep pipeline and result export."""

from .export import ResultExporter
from .sweep import SweepRunner, reproduce_figure, with_sweep_value

__all__ = ["ResultExporter", "SweepRunner", "reproduce_figure", "with_sweep_value"]
