"""Exception types raised across the package."""


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes."""


class NumericError(ValueError):
    """Input contains NaN or infinite entries."""


class UndefinedCoherenceError(ValueError):
    """Coherence requested for a matrix with no nonzero singular value."""


class RankDeficiencyError(ValueError):
    """Unregularized least squares hit a singular normal system."""


class DegenerateLabelsError(ValueError):
    """A label vector that must contain both classes does not."""


class StratificationError(RuntimeError):
    """No two-class train/test partition found within the retry budget."""


class DivergenceError(RuntimeError):
    """The completion solver produced a non-finite objective value."""

    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration


class DatasetFormatError(ValueError):
    """A dataset file could not be parsed; message carries the location."""


class PoolExhausted(Exception):
    """Control-flow signal: no missing entries are left to select from.

    Deliberately not a subclass of the error types above; the experiment
    loop catches it to stop cleanly.
    """
