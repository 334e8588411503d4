"""Exception hierarchy shared by the solvers, metrics and CLI."""


class EpibenchError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(EpibenchError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class GridError(EpibenchError, ValueError):
    """A requested grid is malformed or does not divide the interval."""


class GridMismatchError(EpibenchError, ValueError):
    pass


class NumericalFailure(EpibenchError, ArithmeticError):
    """Base class for failures that occur while integrating."""


class NonFiniteStateError(NumericalFailure):
    """A state component became NaN or infinite.

    ``node`` is the index of the first non-finite node and ``partial`` holds
    the trajectory computed up to (and including) that node.
    """

    def __init__(self, node, partial=None, message=None):
        self.node = node
        self.partial = partial
        super().__init__(message or f"non-finite state at node {node}")


class StepSizeUnderflowError(NumericalFailure):
    pass


class MaxStepsExceededError(NumericalFailure):
    pass
