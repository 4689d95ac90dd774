import math

import numpy as np
import pytest

import reactlearn as rl
from reactlearn.errors import ContractViolationError, SimulationCapError


def decay_system():
    """1 I -> 1 R at rate 5 over species (I, R)."""
    species = rl.SpeciesSet(("I", "R"))
    return rl.ReactionSystem(species, np.array([[1, 0, 0, 1]]), np.array([5.0]))


def test_grid_validation():
    with pytest.raises(ContractViolationError):
        rl.SnapshotGrid(np.array([]))
    with pytest.raises(ContractViolationError):
        rl.SnapshotGrid(np.array([0.0, 1.0]))
    with pytest.raises(ContractViolationError):
        rl.SnapshotGrid(np.array([1.0, 1.0]))


def test_equidistant_grid():
    grid = rl.SnapshotGrid.equidistant(1.0, 100)
    assert len(grid) == 100
    assert grid.times[0] == pytest.approx(0.01)
    assert grid.times[-1] == pytest.approx(1.0)


def test_zero_rate_system_stays_at_init():
    species = rl.SpeciesSet(("A", "B"))
    system = rl.ReactionSystem(species, np.array([[1, 0, 0, 1]]), np.array([0.0]))
    init = rl.State(np.array([7, 3]))
    series = rl.simulate(system, init, rl.SnapshotGrid.equidistant(1.0, 10), rl.RngStream(0))
    assert np.all(series.values == [7, 3])


def test_absorbing_state_fills_remaining_rows():
    init = rl.State(np.array([3, 0]))
    series = rl.simulate(decay_system(), init, rl.SnapshotGrid.equidistant(50.0, 20), rl.RngStream(4))
    # by t=50 the decay has certainly absorbed at I=0
    assert series.values[-1].tolist() == [0.0, 3.0]
    assert np.all(series.values.sum(axis=1) == 3)


def test_sir_conservation(grid100):
    series = rl.simulate(rl.sir_system(), rl.SIR_INIT, grid100, rl.RngStream(11))
    assert np.all(series.values.sum(axis=1) == 2000)


def test_simulate_deterministic_for_fixed_seed(grid100):
    a = rl.simulate(rl.sir_system(), rl.SIR_INIT, grid100, rl.RngStream(42))
    b = rl.simulate(rl.sir_system(), rl.SIR_INIT, grid100, rl.RngStream(42))
    assert a == b
    c = rl.simulate(rl.sir_system(), rl.SIR_INIT, grid100, rl.RngStream(43))
    assert a != c


def test_decay_mean_matches_analytic_solution():
    # linear death process: E[I(t)] = I0 * exp(-r t); check t=0.2, r=5, I0=20
    grid = rl.SnapshotGrid(np.array([0.2]))
    init = rl.State(np.array([20, 0]))
    n = 3000
    values = np.empty(n)
    for k in range(n):
        values[k] = rl.simulate(decay_system(), init, grid, rl.RngStream(100).child(k)).values[0, 0]
    expected = 20 * math.exp(-1.0)
    se = values.std(ddof=1) / math.sqrt(n)
    assert abs(values.mean() - expected) <= 3 * se


def test_step_absorbing_returns_none():
    system = decay_system()
    assert rl.ssa_step(system, rl.State(np.array([0, 5])), rl.RngStream(0)) is None


def test_step_single_reaction_always_index_zero():
    system = decay_system()
    rng = rl.RngStream(1)
    for _ in range(50):
        dt, index = rl.ssa_step(system, rl.State(np.array([20, 0])), rng)
        assert index == 0
        assert dt > 0


def test_step_mean_waiting_time():
    # total propensity 5 * 20 = 100 => E[dt] = 1/100
    system = decay_system()
    state = rl.State(np.array([20, 0]))
    rng = rl.RngStream(5)
    n = 100_000
    dts = np.array([rl.ssa_step(system, state, rng)[0] for _ in range(n)])
    se = dts.std(ddof=1) / math.sqrt(n)
    assert abs(dts.mean() - 0.01) <= 3 * se


def test_step_categorical_frequencies():
    # SIR at (1980, 20, 0): P(infection) = 792 / 892
    system = rl.sir_system()
    state = rl.State(np.array([1980, 20, 0]))
    rng = rl.RngStream(6)
    n = 50_000
    picks = np.array([rl.ssa_step(system, state, rng)[1] for _ in range(n)])
    p = 792.0 / 892.0
    se = math.sqrt(p * (1 - p) / n)
    assert abs((picks == 0).mean() - p) <= 4 * se


def test_mean_time_series_single_replication(grid100):
    rng = rl.RngStream(9)
    mean = rl.mean_time_series(rl.sir_system(), rl.SIR_INIT, grid100, 1, rng)
    single = rl.simulate(rl.sir_system(), rl.SIR_INIT, grid100, rng.child(0))
    assert mean == single


def test_mean_time_series_deterministic_and_parallel_equal(grid100):
    seq = rl.mean_time_series(rl.sir_system(), rl.SIR_INIT, grid100, 8, rl.RngStream(3))
    par = rl.mean_time_series(rl.sir_system(), rl.SIR_INIT, grid100, 8, rl.RngStream(3), jobs=4)
    assert seq == par


def test_mean_time_series_zero_rate_any_replications():
    species = rl.SpeciesSet(("A",))
    system = rl.ReactionSystem(species, np.array([[1, 1]]), np.array([0.0]))
    init = rl.State(np.array([5]))
    mean = rl.mean_time_series(system, init, rl.SnapshotGrid.equidistant(1.0, 5), 7, rl.RngStream(0))
    assert np.all(mean.values == 5)


def test_decay_replication_mean(grid100):
    init = rl.State(np.array([20, 0]))
    grid = rl.SnapshotGrid(np.array([0.2]))
    mean = rl.mean_time_series(decay_system(), init, grid, 5000, rl.RngStream(8))
    # std of I(0.2) is below sqrt(20), so 3 standard errors is ~0.19
    assert abs(mean.values[0, 0] - 20 * math.exp(-1.0)) <= 3 * math.sqrt(20 / 5000) * 3


def test_event_cap_raises_for_explosive_system():
    species = rl.SpeciesSet(("A",))
    growth = rl.ReactionSystem(species, np.array([[1, 2]]), np.array([100.0]))
    init = rl.State(np.array([10]))
    with pytest.raises(SimulationCapError):
        rl.simulate(growth, init, rl.SnapshotGrid.equidistant(10.0, 5), rl.RngStream(0), max_events=1000)


def test_self_loops_do_not_change_snapshot_law():
    # appending an identity reaction leaves propensity-weighted dynamics alone
    base = rl.sir_system()
    with_loop = rl.ReactionSystem(
        base.species,
        np.vstack([base.coefficients, [[1, 0, 0, 1, 0, 0]]]),
        np.concatenate([base.rates, [50.0]]),
    )
    grid = rl.SnapshotGrid.equidistant(1.0, 20)
    a = rl.simulate(base, rl.SIR_INIT, grid, rl.RngStream(77))
    b = rl.simulate(with_loop, rl.SIR_INIT, grid, rl.RngStream(77))
    assert a.values.tolist() == b.values.tolist()


def test_timeseries_csv_round_trip(tmp_path, grid100):
    series = rl.simulate(rl.sir_system(), rl.SIR_INIT, grid100, rl.RngStream(2))
    path = tmp_path / "ref.csv"
    rl.write_timeseries_csv(path, series)
    assert rl.read_timeseries_csv(path) == series


def test_timeseries_validation(grid100):
    with pytest.raises(ContractViolationError):
        rl.TimeSeries(grid100, np.zeros((3, 2)))
    with pytest.raises(ContractViolationError):
        rl.TimeSeries(rl.SnapshotGrid(np.array([1.0])), np.array([[-1.0]]))
