"""Exact stochastic simulation (Gillespie's direct method).

Trajectories are sampled event by event: the waiting time is exponential
with rate equal to the total propensity, and the firing reaction is drawn
from the categorical distribution with probabilities proportional to the
individual propensities. States are recorded on a fixed snapshot grid as a
right-continuous step function: the value at grid time t is the state
immediately before the first event with event time > t.

The event loop is JIT-compiled. Reactions sharing the same reactant row
are grouped so the per-event propensity update costs one mass-action
factor per distinct reactant row instead of one per reaction; within a
group the firing reaction is picked from a precomputed rate cumsum. Rows
with zero rate or zero net effect are dropped before simulation: self-loop
transitions do not change the law of a CTMC, so snapshots are distributed
exactly as if they were simulated.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ContractViolationError, SimulationCapError
from .reactions import ReactionSystem, State
from .rng import RngStream

DEFAULT_MAX_EVENTS = 100_000_000


@dataclass(frozen=True)
class SnapshotGrid:
    """Strictly increasing positive snapshot times."""

    times: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64).reshape(-1)
        if times.shape[0] == 0:
            raise ContractViolationError("snapshot grid must be non-empty")
        if times[0] <= 0 or np.any(np.diff(times) <= 0):
            raise ContractViolationError("snapshot times must be strictly increasing and > 0")
        times.setflags(write=False)
        object.__setattr__(self, "times", times)

    def __len__(self):
        return self.times.shape[0]

    def __eq__(self, other):
        return isinstance(other, SnapshotGrid) and np.array_equal(self.times, other.times)

    @staticmethod
    def equidistant(t_end: float, n_points: int) -> "SnapshotGrid":
        """n_points equidistant times k * t_end / n_points, k = 1..n_points."""
        if t_end <= 0 or n_points < 1:
            raise ContractViolationError("t_end and n_points must be positive")
        return SnapshotGrid(t_end * np.arange(1, n_points + 1) / n_points)


@dataclass(frozen=True)
class TimeSeries:
    """Species values (counts or replication means) on a snapshot grid."""

    grid: SnapshotGrid
    values: np.ndarray
    species_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != len(self.grid):
            raise ContractViolationError(
                f"values shape {values.shape} does not match grid length {len(self.grid)}"
            )
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ContractViolationError("values must be finite and non-negative")
        names = tuple(self.species_names)
        if not names:
            names = tuple(f"X{j}" for j in range(values.shape[1]))
        if len(names) != values.shape[1]:
            raise ContractViolationError("one species name per column required")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "species_names", names)

    @property
    def n_species(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        return (
            isinstance(other, TimeSeries)
            and self.grid == other.grid
            and self.species_names == other.species_names
            and np.array_equal(self.values, other.values)
        )


def write_timeseries_csv(path, series: TimeSeries) -> None:
    """Write the CSV interchange format: header ``t,<species...>``."""
    with open(path, "w", newline="") as fh:
        fh.write("t," + ",".join(series.species_names) + "\n")
        for t, row in zip(series.grid.times, series.values):
            fh.write(repr(float(t)) + "," + ",".join(repr(float(v)) for v in row) + "\n")


def read_timeseries_csv(path) -> TimeSeries:
    """Read the CSV interchange format written by :func:`write_timeseries_csv`."""
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip().split(",")
        if len(header) < 2 or header[0] != "t":
            raise ContractViolationError(f"bad time-series header {header} in {path}")
        times, rows = [], []
        for line in fh:
            if not line.strip():
                continue
            cells = line.strip().split(",")
            if len(cells) != len(header):
                raise ContractViolationError(f"ragged row in {path}: {line.strip()!r}")
            times.append(float(cells[0]))
            rows.append([float(c) for c in cells[1:]])
    return TimeSeries(SnapshotGrid(np.array(times)), np.array(rows), tuple(header[1:]))


def ssa_step(system: ReactionSystem, state: State, rng: RngStream):
    """One direct-method event: ``(dt, reaction_index)``, or None if absorbed.

    The waiting time is Exp(total propensity); the reaction is categorical
    with probabilities proportional to the propensities. The uniform draw
    for the waiting time is taken from the open interval (0, 1), so dt > 0.
    """
    from .reactions import propensities

    alpha = propensities(system, state)
    a_tot = alpha.sum()
    if a_tot <= 0.0:
        return None
    gen = rng.generator
    u = gen.random()
    while u == 0.0:
        u = gen.random()
    dt = -np.log(u) / a_tot
    v = gen.random() * a_tot
    index = int(np.searchsorted(np.cumsum(alpha), v, side="right"))
    return dt, min(index, alpha.shape[0] - 1)


@njit(cache=True, nogil=True)
def _ssa_events(
    group_react,  # (n_groups, n_species) reactant coefficients per group
    group_rate,  # (n_groups,) total rate per group
    member_cum,  # (n_members,) within-group cumulative rates, grouped layout
    member_net,  # (n_members, n_species) net state changes, grouped layout
    group_start,  # (n_groups + 1,) member offsets per group
    times,  # (n_times,) snapshot grid
    counts,  # (n_species,) working state, mutated in place
    out,  # (n_times, n_species) snapshot output
    max_events,
    rng,
):
    n_groups = group_react.shape[0]
    n_species = counts.shape[0]
    n_times = times.shape[0]
    alpha = np.empty(n_groups, dtype=np.float64)
    factor = np.empty(n_groups, dtype=np.float64)
    t = 0.0
    idx = 0
    events = 0
    while True:
        a_tot = 0.0
        for g in range(n_groups):
            f = 1.0
            for j in range(n_species):
                c = group_react[g, j]
                x = counts[j]
                for k in range(c):
                    f *= (x - k) / (k + 1.0)
                if f <= 0.0:
                    f = 0.0
                    break
            factor[g] = f
            alpha[g] = f * group_rate[g]
            a_tot += alpha[g]
        if a_tot <= 0.0:
            while idx < n_times:
                for j in range(n_species):
                    out[idx, j] = counts[j]
                idx += 1
            return events
        u = rng.random()
        while u == 0.0:
            u = rng.random()
        t_new = t - np.log(u) / a_tot
        while idx < n_times and times[idx] < t_new:
            for j in range(n_species):
                out[idx, j] = counts[j]
            idx += 1
        if idx >= n_times:
            return events
        v = rng.random() * a_tot
        g_sel = n_groups - 1
        acc = 0.0
        for g in range(n_groups):
            acc += alpha[g]
            if v < acc:
                g_sel = g
                break
        # position of v inside the selected group, in rate units
        w = (v - (acc - alpha[g_sel])) / factor[g_sel]
        lo = group_start[g_sel]
        hi = group_start[g_sel + 1]
        m_sel = hi - 1
        for m in range(lo, hi):
            if w < member_cum[m]:
                m_sel = m
                break
        for j in range(n_species):
            counts[j] += member_net[m_sel, j]
        t = t_new
        events += 1
        if events >= max_events:
            return -1


@dataclass(frozen=True)
class _CompiledSystem:
    """Grouped arrays consumed by the event kernel."""

    group_react: np.ndarray
    group_rate: np.ndarray
    member_cum: np.ndarray
    member_net: np.ndarray
    group_start: np.ndarray


def _compile_system(system: ReactionSystem) -> _CompiledSystem:
    n_s = system.n_species
    reactants = system.reactants
    net = system.products - reactants
    # zero-rate rows never fire; zero-net rows are CTMC self-loops
    keep = (system.rates > 0.0) & np.any(net != 0, axis=1)
    reactants = reactants[keep]
    net = net[keep]
    rates = system.rates[keep]
    order = np.lexsort(reactants.T[::-1])
    reactants, net, rates = reactants[order], net[order], rates[order]
    group_react, group_rate, member_cum, group_start = [], [], [], [0]
    i = 0
    while i < rates.shape[0]:
        j = i
        while j < rates.shape[0] and np.array_equal(reactants[j], reactants[i]):
            j += 1
        group_react.append(reactants[i])
        group_rate.append(rates[i:j].sum())
        member_cum.extend(np.cumsum(rates[i:j]))
        group_start.append(j)
        i = j
    return _CompiledSystem(
        np.array(group_react, dtype=np.int64).reshape(-1, n_s),
        np.array(group_rate, dtype=np.float64),
        np.array(member_cum, dtype=np.float64),
        np.ascontiguousarray(net, dtype=np.int64),
        np.array(group_start, dtype=np.int64),
    )


def _simulate_into(
    compiled: _CompiledSystem,
    init_counts: np.ndarray,
    times: np.ndarray,
    out: np.ndarray,
    rng: RngStream,
    max_events: int,
) -> None:
    events = _ssa_events(
        compiled.group_react,
        compiled.group_rate,
        compiled.member_cum,
        compiled.member_net,
        compiled.group_start,
        times,
        init_counts.copy(),
        out,
        max_events,
        rng.generator,
    )
    if events < 0:
        raise SimulationCapError(
            f"trajectory exceeded the safety cap of {max_events} events; "
            "the candidate system is likely non-conserving or explosive"
        )


def simulate(
    system: ReactionSystem,
    init: State,
    grid: SnapshotGrid,
    rng: RngStream,
    max_events: int = DEFAULT_MAX_EVENTS,
) -> TimeSeries:
    """Sample one trajectory, recording the state at every grid time."""
    if init.n_species != system.n_species:
        raise ContractViolationError(
            f"init has {init.n_species} species, system has {system.n_species}"
        )
    compiled = _compile_system(system)
    out = np.empty((len(grid), system.n_species), dtype=np.float64)
    _simulate_into(compiled, init.counts, grid.times, out, rng, max_events)
    return TimeSeries(grid, out, system.species.names)


def mean_time_series(
    system: ReactionSystem,
    init: State,
    grid: SnapshotGrid,
    replications: int,
    rng: RngStream,
    max_events: int = DEFAULT_MAX_EVENTS,
    jobs: int = 1,
) -> TimeSeries:
    """Element-wise mean over independent replications of :func:`simulate`.

    Each replication draws from the seed-derived sub-stream ``rng.child(k)``,
    so the result is identical for sequential and parallel execution.
    """
    if replications < 1:
        raise ContractViolationError("replications must be >= 1")
    compiled = _compile_system(system)
    times = grid.times
    n_t, n_s = len(grid), system.n_species
    outs = np.empty((replications, n_t, n_s), dtype=np.float64)

    def run(k):
        _simulate_into(compiled, init.counts, times, outs[k], rng.child(k), max_events)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(run, range(replications)))
    else:
        for k in range(replications):
            run(k)
    mean = outs[0].copy()
    for k in range(1, replications):
        mean += outs[k]
    mean /= replications
    return TimeSeries(grid, mean, system.species.names)
