"""Exception types raised across the package."""


class GpepsError(Exception):
    """Base class for all package errors."""


class InvalidArgument(GpepsError, ValueError):
    pass


class NumericError(GpepsError, ArithmeticError):
    pass


class CapacityError(GpepsError, MemoryError):
    pass


class UndefinedObservable(GpepsError, KeyError):
    pass


class ConvergenceError(GpepsError, RuntimeError):
    """Raised when an iterative routine exhausts its iteration budget."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual
