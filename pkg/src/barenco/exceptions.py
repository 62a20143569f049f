"""Exception types shared across the package."""


class ContractViolationError(ValueError):
    """An input violates a documented precondition (bad shape, wrong units,
    non-Hermitian matrix where one is required, ...)."""


class InfeasibleGateError(ValueError):
    """The requested gate cannot be realized with the given interaction
    parameters.  The message names the violated condition."""
