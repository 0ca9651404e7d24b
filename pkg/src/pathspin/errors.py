"""Exception types raised across the package."""


class PathSpinError(Exception):
    pass


class NotNormalized(PathSpinError, ValueError):
    pass


class NonHermitianObservable(PathSpinError, ValueError):
    pass


class DegenerateBranch(PathSpinError):
    """A projection landed on a branch of (numerically) zero probability."""

    def __init__(self, probability: float):
        super().__init__(f"branch probability {probability:.3e} is below the degeneracy cutoff")
        self.probability = probability


class InvalidSampleCount(PathSpinError, ValueError):
    pass


class TooManySettings(PathSpinError, ValueError):
    pass


class SolverStall(PathSpinError, RuntimeError):
    """The simplex iteration cap was hit; the verdict is indeterminate."""


class InvariantViolation(PathSpinError, AssertionError):
    pass
