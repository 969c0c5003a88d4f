"""Exception hierarchy.

The CLI maps ``ValidationError`` to exit code 2 and ``NumericalError`` to 3.
"""


class OfbmError(Exception):
    pass


class ValidationError(OfbmError, ValueError):
    """Bad input: shapes, ranges, malformed files."""


class NumericalError(OfbmError, ArithmeticError):
    """A computation that cannot produce a valid result for these inputs."""


class AdmissibilityError(NumericalError):
    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic


class OctaveError(NumericalError):
    def __init__(self, message, deepest=None):
        super().__init__(message)
        self.deepest = deepest
