"""Reaction systems over species populations.

A reaction system is a coefficient matrix together with a vector of
stochastic rate constants. Row i of the coefficient matrix holds the
reactant coefficients in its first ``n_species`` columns and the product
coefficients in the remaining ``n_species`` columns. Propensities follow
the stochastic mass action law: each reactant species contributes the
number of distinct tuples that can be drawn from its population, e.g. a
coefficient of 2 on species A contributes A*(A-1)/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from .errors import ContractViolationError


@dataclass(frozen=True)
class SpeciesSet:
    """An ordered collection of uniquely named species."""

    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(names) < 1:
            raise ContractViolationError("at least one species is required")
        if len(set(names)) != len(names):
            raise ContractViolationError(f"duplicate species names in {names}")
        if any(not n for n in names):
            raise ContractViolationError("species names must be non-empty")

    @property
    def n_species(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ContractViolationError(f"unknown species {name!r}") from None


@dataclass(frozen=True)
class State:
    """Species copy numbers at one instant."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1:
            raise ContractViolationError("state counts must be a 1-d vector")
        if np.any(counts < 0):
            raise ContractViolationError("state counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n_species(self) -> int:
        return self.counts.shape[0]

    def __eq__(self, other):
        return isinstance(other, State) and np.array_equal(self.counts, other.counts)


@dataclass(frozen=True)
class ReactionSystem:
    """A set of reactions given by coefficients and rate constants.

    ``coefficients`` has shape (n_reactions, 2 * n_species): reactant
    coefficients first, then product coefficients. All coefficients are
    non-negative integers; all rates are non-negative finite reals.
    """

    species: SpeciesSet
    coefficients: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        n_s = self.species.n_species
        coeff = np.asarray(self.coefficients, dtype=np.int64).reshape(-1, 2 * n_s)
        rates = np.asarray(self.rates, dtype=np.float64).reshape(-1)
        if coeff.shape[0] != rates.shape[0]:
            raise ContractViolationError(
                f"{coeff.shape[0]} coefficient rows but {rates.shape[0]} rates"
            )
        if np.any(coeff < 0):
            raise ContractViolationError("coefficients must be non-negative")
        if np.any(rates < 0) or not np.all(np.isfinite(rates)):
            raise ContractViolationError("rates must be non-negative and finite")
        coeff.setflags(write=False)
        rates.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)
        object.__setattr__(self, "rates", rates)

    @property
    def n_species(self) -> int:
        return self.species.n_species

    @property
    def n_reactions(self) -> int:
        return self.rates.shape[0]

    @property
    def reactants(self) -> np.ndarray:
        return self.coefficients[:, : self.n_species]

    @property
    def products(self) -> np.ndarray:
        return self.coefficients[:, self.n_species :]

    def __eq__(self, other):
        return (
            isinstance(other, ReactionSystem)
            and self.species == other.species
            and np.array_equal(self.coefficients, other.coefficients)
            and np.array_equal(self.rates, other.rates)
        )


def mass_action_factor(counts: np.ndarray, reactant_row: np.ndarray) -> float:
    """Number of ways to pick the reactant multiset from the population."""
    factor = 1.0
    for x, c in zip(counts, reactant_row):
        for k in range(c):
            factor *= (x - k) / (k + 1)
        if factor <= 0.0:
            return 0.0
    return factor


def propensities(system: ReactionSystem, state: State) -> np.ndarray:
    """Stochastic mass-action propensities of every reaction in ``state``."""
    if state.n_species != system.n_species:
        raise ContractViolationError(
            f"state has {state.n_species} species, system has {system.n_species}"
        )
    reactants = system.reactants
    alpha = np.empty(system.n_reactions, dtype=np.float64)
    for i in range(system.n_reactions):
        alpha[i] = system.rates[i] * mass_action_factor(state.counts, reactants[i])
    return alpha


def state_change(system: ReactionSystem, reaction_index: int) -> np.ndarray:
    """Net population change (products minus reactants) of one reaction."""
    if not 0 <= reaction_index < system.n_reactions:
        raise ContractViolationError(
            f"reaction index {reaction_index} out of range [0, {system.n_reactions})"
        )
    row = system.coefficients[reaction_index]
    n_s = system.n_species
    return row[n_s:] - row[:n_s]


def net_changes(system: ReactionSystem) -> np.ndarray:
    """Net population change of every reaction, shape (n_reactions, n_species)."""
    return system.products - system.reactants


@dataclass(frozen=True)
class ReactionLibrary:
    """An ordered set of count-conserving candidate reactions.

    Rows are coefficient vectors of length 2 * n_species. Every row must
    conserve the total population (reactant count equals product count), so
    any total is preserved; ``conserved_total`` documents the population the
    library is meant for and is used for validation downstream.
    """

    species: SpeciesSet
    reactions: np.ndarray
    conserved_total: int = 2000

    def __post_init__(self):
        n_s = self.species.n_species
        rows = np.asarray(self.reactions, dtype=np.int64).reshape(-1, 2 * n_s)
        if self.conserved_total <= 0:
            raise ContractViolationError("conserved_total must be positive")
        react_sum = rows[:, :n_s].sum(axis=1)
        prod_sum = rows[:, n_s:].sum(axis=1)
        if np.any(react_sum != prod_sum):
            raise ContractViolationError("library rows must conserve the total count")
        if len({tuple(r) for r in rows}) != rows.shape[0]:
            raise ContractViolationError("library rows must be unique")
        rows.setflags(write=False)
        object.__setattr__(self, "reactions", rows)

    @property
    def size(self) -> int:
        return self.reactions.shape[0]

    def system(self, rates: np.ndarray) -> ReactionSystem:
        """Instantiate the full library as a system with the given rates."""
        rates = np.asarray(rates, dtype=np.float64)
        if rates.shape != (self.size,):
            raise ContractViolationError(
                f"expected {self.size} rates, got {rates.shape}"
            )
        return ReactionSystem(self.species, self.reactions, rates)

    def subsystem(self, indices, rates) -> ReactionSystem:
        """Instantiate a subset of library rows as a system."""
        idx = np.asarray(indices, dtype=np.int64)
        return ReactionSystem(self.species, self.reactions[idx], rates)

    def restrict(self, indices) -> "ReactionLibrary":
        """A new library holding only the given rows, in the given order."""
        idx = np.asarray(indices, dtype=np.int64)
        return ReactionLibrary(self.species, self.reactions[idx], self.conserved_total)


def enumerate_library(species: SpeciesSet, conserved_total: int = 2000) -> ReactionLibrary:
    """All binary, count-conserving reactions over the given species.

    Both the reactant and the product side are multisets of exactly two
    species, so every row conserves the total population. For n species this
    yields (n*(n+1)/2)**2 rows, identity rows included, in lexicographic
    order of the coefficient row.
    """
    n_s = species.n_species
    sides = []
    for pair in combinations_with_replacement(range(n_s), 2):
        side = np.zeros(n_s, dtype=np.int64)
        for j in pair:
            side[j] += 1
        sides.append(side)
    rows = [
        np.concatenate([reac, prod]) for reac in sides for prod in sides
    ]
    rows.sort(key=tuple)
    return ReactionLibrary(species, np.array(rows), conserved_total)


# Coefficient matrix and rates of the SIR example model: infection
# 1S + 1I -> 2I at 0.02, recovery 1I -> 1R at 5.0.
SIR_SPECIES = SpeciesSet(("S", "I", "R"))
SIR_COEFFICIENTS = np.array(
    [
        [1, 1, 0, 0, 2, 0],
        [0, 1, 0, 0, 0, 1],
    ],
    dtype=np.int64,
)
SIR_RATES = np.array([0.02, 5.0])
SIR_INIT = State(np.array([1980, 20, 0]))


def sir_system() -> ReactionSystem:
    """The SIR disease-spread example model."""
    return ReactionSystem(SIR_SPECIES, SIR_COEFFICIENTS, SIR_RATES)
