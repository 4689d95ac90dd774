"""Learning stochastic reaction systems from time-series snapshots.

The package combines an exact Gillespie simulator with a Gaussian-smoothed
zeroth-order gradient estimator and Adam to estimate rate constants and,
under several problem encodings, model structure.
"""

__version__ = "0.1.0"

from .errors import (
    ContractViolationError,
    DescentAbortedError,
    GradientEstimationError,
    ModelParseError,
    RateDomainError,
    SimulationCapError,
)
from .rng import RngStream
from .reactions import (
    ReactionLibrary,
    ReactionSystem,
    SpeciesSet,
    State,
    enumerate_library,
    propensities,
    sir_system,
    state_change,
    SIR_COEFFICIENTS,
    SIR_INIT,
    SIR_RATES,
    SIR_SPECIES,
)
from .dsl import format_system, parse_model_file, parse_system
from .ssa import (
    SnapshotGrid,
    TimeSeries,
    mean_time_series,
    read_timeseries_csv,
    simulate,
    ssa_step,
    write_timeseries_csv,
)
from .reparam import ReparamConfig, from_rate, to_rate
from .loss import Objective, rmse
from .grad import EstimatorConfig, GradientEstimate, estimate_gradient, finite_difference_oracle
from .optimize import AdamState, ConvergenceTrace, adam_step, run_descent, write_trace_csv
from .problems import (
    CoefficientSteps,
    FixedStructureRates,
    LibraryOfReactions,
    LibraryOfSystems,
    ReactionSteps,
    aggregate_loss,
)

__all__ = [
    "AdamState",
    "CoefficientSteps",
    "ContractViolationError",
    "ConvergenceTrace",
    "DescentAbortedError",
    "EstimatorConfig",
    "FixedStructureRates",
    "GradientEstimate",
    "GradientEstimationError",
    "LibraryOfReactions",
    "LibraryOfSystems",
    "ModelParseError",
    "Objective",
    "RateDomainError",
    "ReactionLibrary",
    "ReactionSteps",
    "ReactionSystem",
    "ReparamConfig",
    "RngStream",
    "SimulationCapError",
    "SnapshotGrid",
    "SpeciesSet",
    "State",
    "TimeSeries",
    "SIR_COEFFICIENTS",
    "SIR_INIT",
    "SIR_RATES",
    "SIR_SPECIES",
    "adam_step",
    "aggregate_loss",
    "enumerate_library",
    "estimate_gradient",
    "finite_difference_oracle",
    "format_system",
    "from_rate",
    "mean_time_series",
    "parse_model_file",
    "parse_system",
    "propensities",
    "read_timeseries_csv",
    "rmse",
    "run_descent",
    "simulate",
    "sir_system",
    "ssa_step",
    "state_change",
    "to_rate",
    "write_timeseries_csv",
    "write_trace_csv",
]
