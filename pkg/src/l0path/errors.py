"""Exception hierarchy for l0path."""


class L0PathError(Exception):
    """Base class for all errors raised by this package."""


class ZeroColumn(L0PathError, ValueError):
    def __init__(self, index):
        super().__init__(f"dictionary column {index} has (numerically) zero norm")
        self.index = index


class DimensionMismatch(L0PathError, ValueError):
    pass


class BadDims(L0PathError, ValueError):
    pass


class AlreadyActive(L0PathError, ValueError):
    def __init__(self, index):
        super().__init__(f"atom {index} is already in the support")
        self.index = index


class NotActive(L0PathError, ValueError):
    def __init__(self, index):
        super().__init__(f"atom {index} is not in the support")
        self.index = index


class RankDeficient(L0PathError, ArithmeticError):
    """The atom is numerically a linear combination of the active atoms."""

    def __init__(self, index, pivot=None):
        super().__init__(f"atom {index} is numerically dependent on the active set (pivot={pivot})")
        self.index = index
        self.pivot = pivot


class EmptySupport(L0PathError, ValueError):
    pass


class CapExceeded(L0PathError, RuntimeError):
    """An iteration or cardinality cap was hit; ``partial`` holds the last iterate."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class IterCapExceeded(CapExceeded):
    pass


class NonDecreasingLambda(L0PathError, ArithmeticError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class OutOfRange(L0PathError, ValueError):
    pass


class TooLarge(L0PathError, ValueError):
    pass


class NoEligibleSegment(L0PathError, ValueError):
    pass


class EmptyGrid(L0PathError, ValueError):
    pass
