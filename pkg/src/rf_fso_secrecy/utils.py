"""Utility functions."""

import math
from datetime import datetime

def db_to_linear(value_db: float) -> float:
    """Convert dB to a linear power ratio."""
    return 10.0 ** (value_db / 10.0)

def linear_to_db(value: float) -> float:
    """Convert a linear power ratio to dB."""
    return 10.0 * math.log10(value)

def delta_list(k: int, a: float) -> list[float]:
    """Return Delta(k, a) = (a/k, (a+1)/k, ..., (a+k-1)/k)."""
    return [(a + j) / k for j in range(k)]

def format_duration(seconds: float) -> str:
    """Format duration in human-readable form."""
    if seconds < 60:
        return f"{seconds:.1f}s"
    elif seconds < 3600:
        minutes = int(seconds // 60)
        secs = int(seconds % 60)
        return f"{minutes}m {secs}s"
    else:
        hours = int(seconds // 3600)
        minutes = int((seconds % 3600) // 60)
        return f"{hours}h {minutes}m"

def get_run_id() -> str:
    """Generate a run ID from the current timestamp."""
    return datetime.now().strftime("%Y%m%d_%H%M%S")
