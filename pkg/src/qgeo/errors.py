"""Exception types raised across the package.

Every domain error derives from :class:`QGeoError` (itself a ``ValueError``)
so callers can catch the whole family at once; the CLI maps them to exit
status 3.
"""


class QGeoError(ValueError):
    """Base class for domain and precondition failures."""


class DimensionMismatchError(QGeoError):
    pass


class UnphysicalStateError(QGeoError):
    """Input is not a valid state: trace, positivity or Bloch norm violated."""


class ProbabilityRangeError(QGeoError):
    """Error probability outside [0, 1]."""


class SingularStateError(QGeoError):
    """The metric diverges: the state sits on (or too close to) the boundary."""


class ZeroProbabilityError(QGeoError):
    pass


class NegativeRadicandError(QGeoError):
    pass


class NegativeP0Error(QGeoError):
    """Four-vector in the lower hemisphere has no physical Bloch preimage."""


class DegenerateSeedError(QGeoError):
    pass


class ConvergenceError(QGeoError, ArithmeticError):
    """Iterative eigensolver exceeded its sweep cap."""
