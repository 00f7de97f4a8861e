"""Exception types shared across the solver modules."""


class AssumptionError(ValueError):
    """A known action set violates the standing assumptions.

    Raised when the known actions contain no strictly productive action
    (some a0 with prob - cost > 0) or contain a costless action.
    """


class ContractPatternError(ValueError):
    """A contract does not match the wage pattern an operation requires."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge within its iteration cap."""


class GameSizeError(ValueError):
    """The action set exceeds the configured cap for mixed enumeration."""


class BestResponseCycleError(RuntimeError):
    """Best-response iteration entered a cycle (non-supermodular game)."""

    def __init__(self, path):
        self.path = list(path)
        super().__init__(f"best-response cycle detected along path {self.path}")
