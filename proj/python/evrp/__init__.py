"""Multi-day electric vehicle route planning."""

from ._evrp import *  # noqa: F401,F403
from ._evrp import EvrpError, Instance, Schedule, Violation, Weights

__all__ = [name for name in dir() if not name.startswith("_")]
