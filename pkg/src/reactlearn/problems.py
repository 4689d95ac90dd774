"""Problem encodings: decoders from a flat parameter vector to models.

Four encodings trade smoothness of the objective against how strongly
they enforce parsimony:

* ``LibraryOfReactions`` — one rate per candidate reaction in a library;
  reactions whose learned rate falls below a threshold are dropped from
  the extracted model. Completely smooth.
* ``CoefficientSteps`` — a fixed number of reactions whose integer
  coefficients (0, 1 or 2) and rates are both optimized; non-smooth in the
  coefficient dimensions.
* ``ReactionSteps`` — a continuous ranking over the library; only the
  top-ranked reactions are simulated, with one rate per rank slot.
* ``LibraryOfSystems`` — brute force: one rate pair per two-reaction
  combination from the library, all optimized at once. The optimized
  scalar is the sum of per-system losses (each pair only affects its own
  summand); reporting uses the minimum.

``FixedStructureRates`` additionally covers plain parameter estimation
with a known structure.

All rate coordinates live in the logarithmic raw space of
:mod:`reactlearn.reparam`; decoded rates are clamped at zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ContractViolationError
from .loss import Objective
from .reactions import ReactionLibrary, ReactionSystem, SpeciesSet, State
from .reparam import ReparamConfig, DEFAULT_REPARAM, to_rate
from .rng import RngStream

# raw-space initialization bounds for rate coordinates; decoded they span
# roughly 4.5e-5 to 12, bracketing the SIR ground-truth rates
RATE_RAW_INIT = (40.0, 90.0)
# library-of-reactions initializes all 36 rates at once, so the bound must
# keep the initial total propensity small enough to simulate; U[30, 65]
# decodes to roughly 3.7e-6..2.4e-2 per reaction
LIBRARY_RATE_RAW_INIT = (30.0, 65.0)
# library-of-systems starts every pair where both rates are observable on
# the snapshot grid (roughly 2.3e-3..0.62 decoded); starting on a flat
# plateau (a rate effectively 0 or infinite for the horizon) makes escape a
# random walk that often exceeds the step budget
SYSTEMS_RATE_RAW_INIT = (55.0, 80.0)
COEFF_INIT = (0.0, 2.0)
RANKING_INIT = (0.0, 1.0)

DEFAULT_EXTRACTION_THRESHOLD = 1e-4


@dataclass(frozen=True)
class LossBreakdown:
    """Loss of one decoded candidate set."""

    optimized: float  # scalar the descent minimizes
    reported: float  # scalar recorded in traces and summaries
    per_system: np.ndarray


class Problem:
    """Common surface of all encodings."""

    name: str
    dimension: int
    # (estimator samples, smoothing sigma, learning rate) defaults
    preset: tuple[int, float, float]

    def __init__(self, reparam: ReparamConfig = DEFAULT_REPARAM):
        self.reparam = reparam

    def _rates(self, raw: np.ndarray) -> np.ndarray:
        return np.clip(to_rate(raw, self.reparam), 0.0, None)

    def _check_theta(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=np.float64).reshape(-1)
        if theta.shape[0] != self.dimension:
            raise ContractViolationError(
                f"{self.name} expects {self.dimension} parameters, got {theta.shape[0]}"
            )
        if not np.all(np.isfinite(theta)):
            raise ContractViolationError("parameter vector must be finite")
        return theta

    def decode(self, theta):
        raise NotImplementedError

    def initialize(self, rng: RngStream) -> np.ndarray:
        raise NotImplementedError

    def loss_breakdown(
        self, theta, objective: Objective, init: State, rng: RngStream, jobs: int = 1
    ) -> LossBreakdown:
        system = self.decode(theta)
        value = objective.evaluate(system, init, rng, jobs=jobs)
        return LossBreakdown(value, value, np.array([value]))

    def loss(self, theta, objective, init, rng, jobs: int = 1) -> float:
        return self.loss_breakdown(theta, objective, init, rng, jobs=jobs).optimized

    def extract(self, theta, objective=None, init=None, rng=None, jobs: int = 1):
        """The final reported model for a parameter vector."""
        return self.decode(theta)

    def estimate_gradient(
        self, theta, objective: Objective, init: State, estimator, rng: RngStream, jobs: int = 1
    ) -> np.ndarray:
        """Smoothed gradient of the optimized loss at ``theta``."""
        from .grad import estimate_gradient

        def f(vec, stream):
            return self.loss(vec, objective, init, stream, jobs=jobs)

        return estimate_gradient(f, theta, estimator, rng, jobs=jobs).vector


class FixedStructureRates(Problem):
    """Estimate rates for a known coefficient matrix."""

    name = "fixed-structure"
    preset = (100, 0.2, 1.0)

    def __init__(self, species: SpeciesSet, coefficients: np.ndarray, reparam=DEFAULT_REPARAM):
        super().__init__(reparam)
        self.species = species
        self.coefficients = np.asarray(coefficients, dtype=np.int64)
        self.dimension = self.coefficients.shape[0]

    def decode(self, theta) -> ReactionSystem:
        theta = self._check_theta(theta)
        return ReactionSystem(self.species, self.coefficients, self._rates(theta))

    def initialize(self, rng: RngStream) -> np.ndarray:
        return rng.generator.uniform(*RATE_RAW_INIT, size=self.dimension)


class LibraryOfReactions(Problem):
    """One rate per library reaction; extraction thresholds small rates away."""

    name = "library-of-reactions"
    preset = (100, 0.2, 1.0)

    def __init__(
        self,
        library: ReactionLibrary,
        threshold: float = DEFAULT_EXTRACTION_THRESHOLD,
        reparam=DEFAULT_REPARAM,
    ):
        super().__init__(reparam)
        if threshold < 0:
            raise ContractViolationError("threshold must be >= 0")
        self.library = library
        self.threshold = threshold
        self.dimension = library.size

    def decode(self, theta) -> ReactionSystem:
        theta = self._check_theta(theta)
        return self.library.system(self._rates(theta))

    def extract(self, theta, objective=None, init=None, rng=None, jobs: int = 1):
        rates = self._rates(self._check_theta(theta))
        keep = np.flatnonzero(rates >= self.threshold)
        return self.library.subsystem(keep, rates[keep])

    def initialize(self, rng: RngStream) -> np.ndarray:
        return rng.generator.uniform(*LIBRARY_RATE_RAW_INIT, size=self.dimension)


class CoefficientSteps(Problem):
    """Directly optimize integer coefficients and rates of a fixed-size model."""

    name = "coefficient-steps"
    preset = (1000, 1.0, 1.0)

    def __init__(self, species: SpeciesSet, model_size: int = 2, reparam=DEFAULT_REPARAM):
        super().__init__(reparam)
        if model_size < 1:
            raise ContractViolationError("model_size must be >= 1")
        self.species = species
        self.model_size = model_size
        self.n_coeff = model_size * 2 * species.n_species
        self.dimension = self.n_coeff + model_size

    def decode(self, theta) -> ReactionSystem:
        theta = self._check_theta(theta)
        clamped = np.clip(theta[: self.n_coeff], 0.0, 2.0)
        coeff = np.floor(clamped + 0.5).astype(np.int64)  # round half away from zero
        coeff = coeff.reshape(self.model_size, 2 * self.species.n_species)
        return ReactionSystem(self.species, coeff, self._rates(theta[self.n_coeff :]))

    def initialize(self, rng: RngStream) -> np.ndarray:
        gen = rng.generator
        coeff = gen.uniform(*COEFF_INIT, size=self.n_coeff)
        rates = gen.uniform(*RATE_RAW_INIT, size=self.model_size)
        return np.concatenate([coeff, rates])


class ReactionSteps(Problem):
    """Rank the library; simulate only the top-ranked reactions.

    Rates are bound to rank slots, not to reaction identities: the
    highest-ranked reaction always receives the first rate coordinate.
    Ties in the ranking break toward the lower library index.
    """

    name = "reaction-steps"
    preset = (100, 0.2, 0.1)

    def __init__(self, library: ReactionLibrary, model_size: int = 2, reparam=DEFAULT_REPARAM):
        super().__init__(reparam)
        if not 1 <= model_size <= library.size:
            raise ContractViolationError("model_size must be in [1, library size]")
        self.library = library
        self.model_size = model_size
        self.dimension = library.size + model_size

    def selected_indices(self, theta) -> np.ndarray:
        theta = self._check_theta(theta)
        ranking = theta[: self.library.size]
        order = np.argsort(-ranking, kind="stable")  # stable -> lower index wins ties
        return order[: self.model_size]

    def decode(self, theta) -> ReactionSystem:
        indices = self.selected_indices(theta)
        rates = self._rates(np.asarray(theta, dtype=np.float64)[self.library.size :])
        return self.library.subsystem(indices, rates)

    def initialize(self, rng: RngStream) -> np.ndarray:
        gen = rng.generator
        ranking = gen.uniform(*RANKING_INIT, size=self.library.size)
        rates = gen.uniform(*RATE_RAW_INIT, size=self.model_size)
        return np.concatenate([ranking, rates])


class LibraryOfSystems(Problem):
    """Brute force: one rate pair per two-reaction combination of the library."""

    name = "library-of-systems"
    preset = (100, 0.2, 0.5)

    def __init__(self, library: ReactionLibrary, reparam=DEFAULT_REPARAM):
        super().__init__(reparam)
        self.library = library
        self.pairs = list(combinations(range(library.size), 2))
        self.dimension = 2 * len(self.pairs)

    @property
    def n_systems(self) -> int:
        return len(self.pairs)

    def decode(self, theta) -> list[ReactionSystem]:
        theta = self._check_theta(theta)
        rates = self._rates(theta)
        return [
            self.library.subsystem(pair, rates[2 * k : 2 * k + 2])
            for k, pair in enumerate(self.pairs)
        ]

    def system_losses(
        self, theta, objective: Objective, init: State, rng: RngStream, jobs: int = 1
    ) -> np.ndarray:
        systems = self.decode(theta)
        losses = np.empty(len(systems))
        if jobs > 1:
            from concurrent.futures import ThreadPoolExecutor

            def one(k):
                return objective.evaluate(systems[k], init, rng.child(k))

            with ThreadPoolExecutor(max_workers=jobs) as pool:
                for k, value in enumerate(pool.map(one, range(len(systems)))):
                    losses[k] = value
        else:
            for k, system in enumerate(systems):
                losses[k] = objective.evaluate(system, init, rng.child(k))
        return losses

    def loss_breakdown(self, theta, objective, init, rng, jobs: int = 1) -> LossBreakdown:
        losses = self.system_losses(theta, objective, init, rng, jobs=jobs)
        return LossBreakdown(float(losses.sum()), float(losses.min()), losses)

    def extract(self, theta, objective=None, init=None, rng=None, jobs: int = 1):
        """The minimum-loss system; requires an evaluation context."""
        if objective is None or init is None or rng is None:
            raise ContractViolationError(
                "library-of-systems extraction needs objective, init and rng"
            )
        losses = self.system_losses(theta, objective, init, rng, jobs=jobs)
        best = int(np.argmin(losses))
        systems = self.decode(theta)
        return systems[best]

    def best_index(self, theta, objective, init, rng, jobs: int = 1) -> int:
        """Index (into pair order) of the minimum-loss system."""
        return int(np.argmin(self.system_losses(theta, objective, init, rng, jobs=jobs)))

    def estimate_gradient(self, theta, objective, init, estimator, rng, jobs: int = 1):
        """Block-structured estimate: each pair from its own loss differences.

        The summed loss decouples over pairs, so perturbing one pair's two
        coordinates while holding the rest fixed yields the same smoothed
        gradient in expectation as perturbing all coordinates jointly, at
        identical evaluation cost but without the other pairs' simulation
        noise leaking into every component.
        """
        from .grad import estimate_gradient

        theta = self._check_theta(theta)
        gradient = np.empty(self.dimension)

        def one(k):
            pair = self.pairs[k]

            def f(vec, stream):
                return objective.evaluate(self.library.subsystem(pair, self._rates(vec)), init, stream)

            return estimate_gradient(f, theta[2 * k : 2 * k + 2], estimator, rng.child(k)).vector

        if jobs > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=jobs) as pool:
                for k, block in enumerate(pool.map(one, range(self.n_systems))):
                    gradient[2 * k : 2 * k + 2] = block
        else:
            for k in range(self.n_systems):
                gradient[2 * k : 2 * k + 2] = one(k)
        return gradient

    def initialize(self, rng: RngStream) -> np.ndarray:
        return rng.generator.uniform(*SYSTEMS_RATE_RAW_INIT, size=self.dimension)


def aggregate_loss(problem: Problem, per_system_losses) -> float:
    """Scalar optimized by the descent for given per-system losses."""
    losses = np.asarray(per_system_losses, dtype=np.float64)
    if isinstance(problem, LibraryOfSystems):
        return float(losses.sum())
    if losses.shape != (1,):
        raise ContractViolationError(
            f"{problem.name} aggregates exactly one loss, got {losses.shape}"
        )
    return float(losses[0])
