"""Exception hierarchy shared by all modules."""


class MomentsError(Exception):
    """Base class for every error raised by this package."""


class NonSquareError(MomentsError, ValueError):
    pass


class NonFiniteEntryError(MomentsError, ValueError):
    pass


class NotHermitianError(MomentsError, ValueError):
    pass


class NotNormalError(MomentsError, ValueError):
    pass


class NoConvergenceError(MomentsError, RuntimeError):
    pass


class InvalidKError(MomentsError, ValueError):
    pass


class EmptyInputError(MomentsError, ValueError):
    pass


class DimensionMismatchError(MomentsError, ValueError):
    pass


class InvalidStateError(MomentsError, ValueError):
    pass


class NonRealSpectrumError(MomentsError, ValueError):
    pass


class TooManyAtomsError(MomentsError, ValueError):
    pass


class ResolutionTooHighError(MomentsError, ValueError):
    pass


class UnknownSuiteError(MomentsError, ValueError):
    pass


class ParseError(MomentsError, ValueError):
    pass


def check_k(k) -> int:
    """Validate a moment order; returns it as a plain int."""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise InvalidKError(f"moment order must be a positive integer, got {k!r}")
    return int(k)
