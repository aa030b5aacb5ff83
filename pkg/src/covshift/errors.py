"""Exception types raised across the package."""


class StructuralError(ValueError):
    """Objects do not fit together (different spaces, bad partitions, ...)."""


class PreconditionError(ValueError):
    """An operation's documented precondition does not hold."""


class IndeterminateError(ArithmeticError):
    """The answer depends on information the source measure cannot provide.

    Raised when the target puts mass on a cell that is null under the source,
    so the source posterior on that cell is not identified.
    """


class QuadratureError(ArithmeticError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (estimated residual {residual:.3e})")
        self.residual = residual


class UninformativeClassifierError(ValueError):
    pass
