"""Exception types shared across the package."""


class GreedyQAOAError(Exception):
    """Base class for all package errors."""


class GraphGenerationError(GreedyQAOAError):
    """Raised when a random graph cannot be produced (infeasible or retry budget exhausted)."""


class CapacityError(GreedyQAOAError):
    """Raised when a problem is too large for dense statevector / diagonal storage."""


class DimensionError(GreedyQAOAError):
    pass


class InvalidProblemError(GreedyQAOAError):
    pass


class NumericalError(GreedyQAOAError):
    pass


class ContractError(GreedyQAOAError):
    """A precondition of an operation was violated by its inputs."""


class ClassificationError(GreedyQAOAError):
    """A stationary point does not have the Hessian inertia the caller requires."""


class ConvergenceError(GreedyQAOAError):
    pass
