"""Evolutionary dynamics of the gantangan deposit game.

Numerical engine for a three-strategy population game: payoff construction,
replicator-mutator flow on the simplex, stationary-state enumeration and
stability, parameter sweeps, and ternary phase-portrait output.
"""

from .dynamics import (
    CONVERGENCE_RESIDUAL,
    MutationKernel,
    StepSizeError,
    Trajectory,
    derivative,
    integrate,
    replicator_field,
    replicator_mutator_field,
    trajectory_phi,
    uniform_kernel,
)
from .equilibria import (
    AttractorLabel,
    FixedPointReport,
    Location,
    Stability,
    SweepCell,
    TernaryPoint,
    classify_stability,
    find_fixed_points,
    interior_lattice,
    jacobian,
    portrait,
    sweep,
    ternary_coordinates,
    ternary_project,
)
from .game import (
    DominanceKind,
    DominanceRelation,
    GantanganParams,
    PopulationState,
    Strategy,
    as_payoff_matrix,
    average_fitness,
    build_payoff,
    dominance,
    dominance_report,
    fitness,
)

__version__ = "0.1.0"

__all__ = [
    "AttractorLabel",
    "CONVERGENCE_RESIDUAL",
    "DominanceKind",
    "DominanceRelation",
    "FixedPointReport",
    "GantanganParams",
    "Location",
    "MutationKernel",
    "PopulationState",
    "Stability",
    "StepSizeError",
    "Strategy",
    "SweepCell",
    "TernaryPoint",
    "Trajectory",
    "as_payoff_matrix",
    "average_fitness",
    "build_payoff",
    "classify_stability",
    "derivative",
    "dominance",
    "dominance_report",
    "find_fixed_points",
    "fitness",
    "integrate",
    "interior_lattice",
    "jacobian",
    "portrait",
    "replicator_field",
    "replicator_mutator_field",
    "sweep",
    "ternary_coordinates",
    "ternary_project",
    "trajectory_phi",
    "uniform_kernel",
]
