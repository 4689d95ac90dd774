"""Adam updates and the outer descent loop."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError, DescentAbortedError
from .grad import EstimatorConfig
from .loss import Objective
from .problems import Problem
from .reactions import State
from .rng import RngStream


@dataclass(frozen=True)
class AdamState:
    """Immutable Adam optimizer state; ``update`` returns the successor."""

    eta: float
    m: np.ndarray
    v: np.ndarray
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.eta <= 0:
            raise ContractViolationError("learning rate must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ContractViolationError("betas must lie in [0, 1)")
        if self.m.shape != self.v.shape:
            raise ContractViolationError("moment accumulators must have equal shape")

    @staticmethod
    def fresh(dimension: int, eta: float, **kwargs) -> "AdamState":
        zeros = np.zeros(dimension)
        return AdamState(eta=eta, m=zeros, v=zeros.copy(), **kwargs)


def adam_step(state: AdamState, theta: np.ndarray, grad: np.ndarray):
    """One bias-corrected Adam update; returns (new state, new theta)."""
    theta = np.asarray(theta, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if theta.shape != grad.shape or theta.shape != state.m.shape:
        raise ContractViolationError("theta, gradient and state dimensions differ")
    if not np.all(np.isfinite(grad)):
        raise ContractViolationError("gradient must be finite")
    t = state.step + 1
    m = state.beta1 * state.m + (1 - state.beta1) * grad
    v = state.beta2 * state.v + (1 - state.beta2) * grad * grad
    m_hat = m / (1 - state.beta1**t)
    v_hat = v / (1 - state.beta2**t)
    new_theta = theta - state.eta * m_hat / (np.sqrt(v_hat) + state.epsilon)
    new_state = AdamState(
        eta=state.eta,
        m=m,
        v=v,
        step=t,
        beta1=state.beta1,
        beta2=state.beta2,
        epsilon=state.epsilon,
    )
    return new_state, new_theta


@dataclass(frozen=True)
class TraceRecord:
    step: int
    loss: float
    theta: np.ndarray


@dataclass
class ConvergenceTrace:
    """Per-step unsmoothed losses and parameters of one descent run."""

    records: list[TraceRecord] = field(default_factory=list)

    @property
    def initial_loss(self) -> float:
        return self.records[0].loss

    @property
    def final_loss(self) -> float:
        return self.records[-1].loss

    @property
    def final_theta(self) -> np.ndarray:
        return self.records[-1].theta

    def losses(self) -> np.ndarray:
        return np.array([r.loss for r in self.records])


def write_trace_csv(path, trace: ConvergenceTrace) -> None:
    """Trace CSV: ``step,loss,theta_0,...,theta_{d-1}``."""
    dim = trace.records[0].theta.shape[0] if trace.records else 0
    with open(path, "w", newline="") as fh:
        fh.write("step,loss," + ",".join(f"theta_{i}" for i in range(dim)) + "\n")
        for rec in trace.records:
            fh.write(
                f"{rec.step},{rec.loss!r},"
                + ",".join(repr(float(x)) for x in rec.theta)
                + "\n"
            )


def run_descent(
    problem: Problem,
    objective: Objective,
    init: State,
    estimator: EstimatorConfig,
    adam: AdamState,
    steps: int,
    init_theta: np.ndarray,
    rng: RngStream,
    jobs: int = 1,
) -> ConvergenceTrace:
    """Smoothed stochastic gradient descent on a problem encoding.

    Each step records the unsmoothed loss (one fresh evaluation, never a
    perturbed one), estimates the smoothed gradient of the loss composed
    with the encoding, and applies one Adam update. The trace holds one
    record per visited parameter vector, including the final one. A failing
    step raises :class:`DescentAbortedError` carrying the partial trace.
    """
    theta = np.asarray(init_theta, dtype=np.float64).copy()
    if theta.shape != (problem.dimension,):
        raise ContractViolationError(
            f"init_theta has shape {theta.shape}, problem dimension is {problem.dimension}"
        )
    if steps < 0:
        raise ContractViolationError("steps must be >= 0")

    trace = ConvergenceTrace()
    state = adam
    try:
        for k in range(steps):
            breakdown = problem.loss_breakdown(theta, objective, init, rng.child(2 * k), jobs=jobs)
            trace.records.append(TraceRecord(k, breakdown.reported, theta.copy()))
            gradient = problem.estimate_gradient(
                theta, objective, init, estimator, rng.child(2 * k + 1), jobs=jobs
            )
            state, theta = adam_step(state, theta, gradient)
        breakdown = problem.loss_breakdown(theta, objective, init, rng.child(2 * steps), jobs=jobs)
        trace.records.append(TraceRecord(steps, breakdown.reported, theta.copy()))
    except (ContractViolationError,) as exc:
        raise
    except Exception as exc:
        raise DescentAbortedError(
            f"descent aborted at step {len(trace.records)}: {exc}", trace, exc
        ) from exc
    return trace
