"""Exception types shared by the numerical modules."""


class ConfigurationError(ValueError):
    """A grid, field or solver configuration is unusable."""


class PreconditionError(ValueError):
    """An input violates a documented precondition of an operation."""


class CapacityError(MemoryError):
    """A dense object would exceed the configured size cap."""


class IterationError(RuntimeError):
    """An iterative solver stopped without meeting its tolerance.

    The last residual and the residual history are kept on the exception so
    callers can report them.
    """

    def __init__(self, message, residual=float("nan"), history=None):
        super().__init__(message)
        self.residual = residual
        self.history = list(history or [])
