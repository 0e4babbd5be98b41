"""Data constants and presets."""

from .constants import (
    BASE_SCENARIO,
    FIGURES,
    PRESETS,
    TURBULENCE,
    figure_curves,
    preset_values,
)

__all__ = [
    "BASE_SCENARIO",
    "FIGURES",
    "PRESETS",
    "TURBULENCE",
    "figure_curves",
    "preset_values",
]
