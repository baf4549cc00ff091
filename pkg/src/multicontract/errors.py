"""Exception hierarchy shared by every stage of the solver."""


class ContractError(Exception):
    """Base class for all errors raised by this package."""


class InstanceFormatError(ContractError):
    """An instance file could not be parsed or does not follow the schema."""


class InstanceValidationError(ContractError):
    """An instance parsed fine but breaks one of the model invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class UnsupportedOracle(ContractError):
    """The requested query is not available for this function class."""


class PreconditionError(ContractError, ValueError):
    """An algorithm was called on inputs that break its stated preconditions."""


class ZeroMarginal(ContractError):
    """An allocated agent has zero marginal contribution, so no contract can incentivize it."""

    def __init__(self, agent, project):
        self.agent = agent
        self.project = project
        super().__init__(f"agent {agent} has zero marginal contribution to project {project}")


class SimplexError(ContractError):
    """The bundled simplex could not finish (unbounded, or iteration budget hit)."""

    def __init__(self, message, basis=None):
        self.basis = basis
        if basis is not None:
            message = f"{message} (basis={list(basis)})"
        super().__init__(message)


class ColumnBudgetExceeded(ContractError):
    """Column generation produced more columns than the configured budget."""


class RoundingError(ContractError):
    """No support set passed the rounding test; indicates numerical drift."""


class GuardExceeded(ContractError):
    """A brute-force oracle was asked to enumerate a space beyond its size guard."""
