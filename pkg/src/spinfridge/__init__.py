"""Transient cooling of a three-qubit absorption refrigerator in spin-star baths."""

from .engine import (
    RefrigeratorEngine,
    RefrigeratorParams,
    TimeSeries,
    TripleSectorLabel,
    enumerate_triple_sectors,
)
from .spinstar import SingleStarParams, local_temperature

__version__ = "0.1.0"

__all__ = [
    "RefrigeratorEngine",
    "RefrigeratorParams",
    "SingleStarParams",
    "TimeSeries",
    "TripleSectorLabel",
    "enumerate_triple_sectors",
    "local_temperature",
    "__version__",
]
