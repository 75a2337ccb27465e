"""Bounded-solution and recurrence toolkit for periodically forced quasilinear systems.

The heavy lifting lives in the compiled extension; this package re-exports its
public surface.
"""

from ._core import (
    Theta,
    build_theta,
    bundled_config,
    detect_sequence,
    logistic_orbit,
    multipliers,
    run,
)

__all__ = [
    "Theta",
    "build_theta",
    "bundled_config",
    "detect_sequence",
    "logistic_orbit",
    "multipliers",
    "run",
]
