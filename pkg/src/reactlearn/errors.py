"""Exception types shared across the package."""


class ContractViolationError(ValueError):
    """An operation was called with arguments violating its preconditions."""


class ModelParseError(ValueError):
    """A model-DSL document could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class RateDomainError(ValueError):
    """A rate value lies outside the domain of the inverse reparametrization."""


class SimulationCapError(RuntimeError):
    """A trajectory exceeded the configured event-count safety cap."""


class GradientEstimationError(RuntimeError):
    """An objective evaluation returned a non-finite value during estimation."""

    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample


class DescentAbortedError(RuntimeError):
    """A descent step failed; carries the partial convergence trace."""

    def __init__(self, message, trace, cause):
        super().__init__(message)
        self.trace = trace
        self.cause = cause
