"""Constrained clustering and constrained set clustering by
difference-of-convex descent with quadratic-penalty continuation.

The public surface:

* :mod:`dcclust.sets` -- convex sets (balls, boxes, halfspaces) with
  projections, distances, and sampling.
* :mod:`dcclust.clustering` -- center placement over point data.
* :mod:`dcclust.set_clustering` -- center placement over convex targets.
* :mod:`dcclust.solver` -- the penalty-continuation solver, plain or with
  an Armijo line search along the difference direction.
* :mod:`dcclust.bench` -- paired multi-start benchmarks and scaling sweeps.
* :mod:`dcclust.data_io` -- dataset and report file formats.
"""

__version__ = "0.1.0"

from .clustering import ClusteringModel
from .set_clustering import SetClusteringModel
from .sets import Ball, Box, ConvexSet, Halfspace, WholeSpace, from_spec, to_spec
from .solver import (LineSearchParams, NumericalFailure, PenaltySchedule,
                     SolveReport, StopRule, Termination, TraceEntry,
                     bdca_solve, dca_solve, descent_violations, next_trial_step)

__all__ = [
    "Ball", "Box", "ClusteringModel", "ConvexSet", "Halfspace",
    "LineSearchParams", "NumericalFailure", "PenaltySchedule",
    "SetClusteringModel", "SolveReport", "StopRule", "Termination",
    "TraceEntry", "WholeSpace", "bdca_solve", "dca_solve",
    "descent_violations", "from_spec", "next_trial_step", "to_spec",
    "__version__",
]
