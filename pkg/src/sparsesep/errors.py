"""Exception hierarchy shared by all modules."""


class SeparationError(ValueError):
    """Base class for every error raised by :mod:`sparsesep`."""


class DimensionMismatch(SeparationError):
    pass


class RankDeficient(SeparationError):
    pass


class ZeroColumn(SeparationError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"column {index} has zero norm")


class TooFewColumns(SeparationError):
    pass


class NonFinite(SeparationError):
    pass


class KTooLarge(SeparationError):
    pass


class OutOfRange(SeparationError):
    pass


class NegativeCoherence(SeparationError):
    pass


class ThresholdViolated(SeparationError):
    pass


class GHatNonpositive(SeparationError):
    pass


class Infeasible(SeparationError):
    pass


class NotConverged(SeparationError):
    """Raised only in strict mode; carries the partial result."""

    def __init__(self, result, message="iteration budget exhausted"):
        self.result = result
        super().__init__(message)


class UnsatisfiableSparsity(SeparationError):
    pass


class ImageTooLarge(SeparationError):
    pass


class FormatError(SeparationError):
    pass
