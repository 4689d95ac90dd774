import numpy as np
import pytest

import reactlearn as rl


@pytest.fixture(scope="session")
def grid100():
    return rl.SnapshotGrid.equidistant(1.0, 100)


@pytest.fixture(scope="session")
def sir_reference(grid100):
    """One seeded ground-truth SIR trajectory, the shared reference data."""
    return rl.simulate(rl.sir_system(), rl.SIR_INIT, grid100, rl.RngStream(12345))


@pytest.fixture(scope="session")
def sir_objective(sir_reference):
    return rl.Objective(sir_reference, replications=20)


@pytest.fixture(scope="session")
def sir_library():
    return rl.enumerate_library(rl.SpeciesSet(("S", "I", "R")), 2000)
