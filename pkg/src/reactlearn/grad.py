"""Gaussian-smoothed stochastic gradient estimation.

The estimator perturbs the whole parameter vector at once with standard
normal directions u and averages forward differences::

    g ~= (1/N) * sum_n ((f(theta + sigma * u_n) - f(theta)) / sigma) * u_n

As N grows this converges to the gradient of a Gaussian-smoothed version
of f, which tolerates jumps and simulation noise. The base value f(theta)
is evaluated once and shared across all N samples; every evaluation
receives its own seed-derived sub-stream (no common random numbers).

A deterministic central-difference oracle is provided for testing against
smooth objectives.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, GradientEstimationError
from .rng import RngStream


@dataclass(frozen=True)
class EstimatorConfig:
    """Sample count and smoothing scale of the estimator."""

    samples: int
    sigma: float

    def __post_init__(self):
        if self.samples < 1:
            raise ContractViolationError("samples must be >= 1")
        if self.sigma <= 0:
            raise ContractViolationError("sigma must be positive")


@dataclass(frozen=True)
class GradientEstimate:
    vector: np.ndarray
    evaluations_used: int


def _check_finite(value: float, label: str) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise GradientEstimationError(
            f"objective returned non-finite value {value} at {label}", sample=label
        )
    return value


def estimate_gradient(
    f,
    theta: np.ndarray,
    cfg: EstimatorConfig,
    rng: RngStream,
    jobs: int = 1,
) -> GradientEstimate:
    """Monte Carlo estimate of the smoothed gradient of ``f`` at ``theta``.

    ``f`` is called as ``f(theta, stream)`` where ``stream`` is an
    :class:`RngStream`; deterministic objectives may ignore the stream.
    Sub-streams: child(0) draws the perturbation directions, child(1)
    evaluates the base point, child(2 + n) evaluates sample n.
    """
    theta = np.asarray(theta, dtype=np.float64)
    n, sigma = cfg.samples, cfg.sigma
    directions = rng.child(0).generator.standard_normal((n, theta.shape[0]))
    f_base = _check_finite(f(theta, rng.child(1)), "base point")

    def sample(k):
        return _check_finite(f(theta + sigma * directions[k], rng.child(2 + k)), f"sample {k}")

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(sample, range(n)))
    else:
        values = [sample(k) for k in range(n)]
    weights = (np.array(values) - f_base) / sigma
    vector = weights @ directions / n
    return GradientEstimate(vector=vector, evaluations_used=n + 1)


def finite_difference_oracle(f, theta: np.ndarray, h: float, rng: RngStream | None = None) -> np.ndarray:
    """Central differences per coordinate; the deterministic comparison baseline."""
    if h <= 0:
        raise ContractViolationError("h must be positive")
    theta = np.asarray(theta, dtype=np.float64)
    if rng is None:
        rng = RngStream(0)
    grad = np.empty_like(theta)
    for i in range(theta.shape[0]):
        step = np.zeros_like(theta)
        step[i] = h
        hi = _check_finite(f(theta + step, rng.child(2 * i)), f"+h at coordinate {i}")
        lo = _check_finite(f(theta - step, rng.child(2 * i + 1)), f"-h at coordinate {i}")
        grad[i] = (hi - lo) / (2 * h)
    return grad
