"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An input is outside its valid domain."""


class DivergenceInfiniteError(ParameterError):
    """The requested divergence is infinite for these distributions."""


class SelfLoopError(ParameterError):
    """An edge query named the same vertex twice."""


class BudgetExhaustedError(RuntimeError):
    """A new pair was queried after the oracle budget was spent."""


class NotApplicableError(RuntimeError):
    """The requested instrumentation is undefined under this hypothesis."""


class InfeasibleConfigError(ParameterError):
    """A detector configuration cannot run on these model parameters."""
