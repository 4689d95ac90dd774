"""The scalar fitting objective.

A candidate system is scored by the root mean squared error between a
reference time series and the mean of a fixed number of simulated
replications, after dividing all values by a normalization constant (by
default the conserved total population, so a perfect-structure fit of the
SIR example lands near 0.01 rather than ~20 raw counts).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError
from .reactions import ReactionSystem, State
from .rng import RngStream
from .ssa import DEFAULT_MAX_EVENTS, TimeSeries, mean_time_series


def rmse(reference: TimeSeries, simulated: TimeSeries, normalization: float = 1.0) -> float:
    """Root mean squared error over all (time, species) cells, normalized."""
    if reference.grid != simulated.grid:
        raise ContractViolationError("time series grids differ")
    if reference.values.shape != simulated.values.shape:
        raise ContractViolationError("time series dimensions differ")
    if normalization <= 0:
        raise ContractViolationError("normalization must be positive")
    diff = (reference.values - simulated.values) / normalization
    return float(np.sqrt(np.mean(diff * diff)))


@dataclass(frozen=True)
class Objective:
    """RMSE of a candidate system against fixed reference data."""

    reference: TimeSeries
    replications: int = 20
    normalization: float | None = None
    max_events: int = DEFAULT_MAX_EVENTS

    def __post_init__(self):
        if self.replications < 1:
            raise ContractViolationError("replications must be >= 1")
        norm = self.normalization
        if norm is None:
            # default to the conserved total population, read off the data
            norm = float(self.reference.values[0].sum())
        if norm <= 0:
            raise ContractViolationError("normalization must be positive")
        object.__setattr__(self, "normalization", float(norm))

    def evaluate(
        self,
        system: ReactionSystem,
        init: State,
        rng: RngStream,
        jobs: int = 1,
    ) -> float:
        """One stochastic sample of the objective for the given system."""
        if system.species.names != self.reference.species_names:
            raise ContractViolationError(
                f"system species {system.species.names} do not match "
                f"reference species {self.reference.species_names}"
            )
        simulated = mean_time_series(
            system,
            init,
            self.reference.grid,
            self.replications,
            rng,
            max_events=self.max_events,
            jobs=jobs,
        )
        return rmse(self.reference, simulated, self.normalization)
