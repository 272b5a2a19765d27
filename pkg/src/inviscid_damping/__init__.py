"""Linearized 2D Euler mode dynamics around degenerate shear and circular flows."""

from .grid import Grid
from .profiles import (
    Interval,
    FlowProfile,
    CircularProfile,
    make_shear_profile,
    make_circular_profile,
    to_log_polar,
    truncate_domain,
)

__version__ = "0.1.0"
