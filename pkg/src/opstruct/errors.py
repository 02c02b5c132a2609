"""Exception hierarchy.  Every error the library raises derives from OpstructError."""


class OpstructError(Exception):
    pass


class InvalidRational(OpstructError, ValueError):
    pass


class NonSquare(OpstructError, ValueError):
    pass


class TruncationExceeded(OpstructError):
    """A computation needs moments beyond the functional's truncation depth."""


class ZeroNorm(OpstructError):
    pass


class NotRegular(OpstructError):
    pass


class InsufficientCoefficients(OpstructError):
    pass


class NotABasis(OpstructError, ValueError):
    pass


class InvalidParameter(OpstructError, ValueError):
    pass


class FavardViolation(InvalidParameter):
    """A recurrence coefficient gamma_n vanished."""


class InvalidRelation(OpstructError, ValueError):
    pass


class MissingFunctional(OpstructError):
    pass


class IndexOutOfRange(OpstructError, IndexError):
    pass


class SingularSystem(OpstructError):
    pass


class InitialConditionsFail(OpstructError):
    pass


class HypothesisFail(OpstructError):
    def __init__(self, message: str, hypothesis: str = ""):
        super().__init__(message)
        self.hypothesis = hypothesis


class SchemaError(OpstructError, ValueError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
