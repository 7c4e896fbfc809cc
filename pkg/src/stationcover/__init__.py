"""Station cover / hitting set laboratory.

Instances are station universes with connections (ordered station
sequences).  The package bundles the dominance reduction rules, exact cover
solvers, heterogeneity/locality metrics, a geometric random-instance
generator, GTFS ingestion, and a sweep harness with CSV/figure output.
"""

from .model import (
    DegreeStats,
    Instance,
    ModelError,
    build_instance,
    connected_components,
    degree_stats,
    largest_component,
    read_hsd,
    write_hsd,
)
from .reduce import ReductionReport, complexity_stats, reduce_to_core
from .solve import Budget, BudgetExhausted, solve_exact, solve_naive, solve_pipeline, verify_cover

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "BudgetExhausted",
    "DegreeStats",
    "Instance",
    "ModelError",
    "ReductionReport",
    "build_instance",
    "complexity_stats",
    "connected_components",
    "degree_stats",
    "largest_component",
    "read_hsd",
    "reduce_to_core",
    "solve_exact",
    "solve_naive",
    "solve_pipeline",
    "verify_cover",
    "write_hsd",
]
