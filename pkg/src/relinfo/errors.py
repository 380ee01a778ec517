"""Exception hierarchy shared by all relinfo modules."""

from __future__ import annotations


class RelinfoError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(RelinfoError, ValueError):
    pass


class OperatorKindError(RelinfoError, ValueError):
    """An operator does not satisfy the invariants of its declared kind."""


class NonCommutingError(RelinfoError, ValueError):
    """Two observables that were required to commute do not."""

    def __init__(self, first: str, second: str, norm: float):
        self.pair = (first, second)
        self.norm = norm
        super().__init__(
            f"observables {first!r} and {second!r} do not commute "
            f"(max |[A,B]| = {norm:.3g})"
        )


class NullSupportError(RelinfoError, ValueError):
    """Conditioning on an outcome whose probability is at or below the support floor."""


class DistributionError(RelinfoError, ValueError):
    pass
