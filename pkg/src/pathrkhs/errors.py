"""Exception hierarchy.

Every error carries the module and operation it was raised from so the
command-line front end can report it as machine-readable JSON.
"""


class PathRKHSError(Exception):
    module = "pathrkhs"

    def __init__(self, message, *, module=None, operation=None):
        super().__init__(message)
        if module is not None:
            self.module = module
        self.operation = operation


class ParameterError(PathRKHSError, ValueError):
    """A constructor or operation received an out-of-range parameter."""


class UsageError(PathRKHSError, ValueError):
    """Inputs are individually valid but cannot be combined."""


class SizeError(PathRKHSError, ValueError):
    pass


class EvaluationError(PathRKHSError, ArithmeticError):
    """A kernel evaluation failed or produced a non-finite value."""


class DefinitenessError(PathRKHSError, ArithmeticError):
    """A Gram matrix is more indefinite than the PSD floor allows."""


class DegenerateEigenvalueError(PathRKHSError, ArithmeticError):
    pass


class WindowError(PathRKHSError, ValueError):
    """Too few trusted eigenvalues for a decay fit."""


class ConditioningError(PathRKHSError, ArithmeticError):
    pass


class SchemaError(PathRKHSError, ValueError):
    module = "cli"
