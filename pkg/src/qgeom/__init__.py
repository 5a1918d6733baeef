"""Geometric kinematics of unitary quantum evolution: speed, acceleration,
arc length, curvature coefficients, and their upper bounds, with a
randomized verification harness for the full inequality chain."""

__version__ = "0.1.0"

from .errors import (ConfigError, DegenerateStateError, DomainError,
                     NumericError, UsageError)
from .schedules import TimeGrid, parse_schedule, serialize_schedule

__all__ = [
    "ConfigError", "DegenerateStateError", "DomainError", "NumericError",
    "UsageError", "TimeGrid", "parse_schedule", "serialize_schedule",
    "__version__",
]
