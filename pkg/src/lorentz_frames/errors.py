"""Exception hierarchy shared across the package."""


class FrameError(Exception):
    """Base class for all domain errors raised by this package."""


# -- indefinite linear algebra ------------------------------------------------

class DegenerateInput(FrameError):
    """A vector projected to a light-like or zero vector during orthonormalization."""


class WrongCharacter(FrameError):
    """A vector has the wrong causal character for its requested slot."""


# -- curves --------------------------------------------------------------------

class NotTimeLike(FrameError):
    """The curve derivative fails to be time-like where it must be."""


class OutOfDomain(FrameError):
    """Parameter value outside the curve domain."""


class UnknownName(FrameError):
    """No gallery entry with the requested name."""


# -- frame constructions ---------------------------------------------------------

class BadInitialFrame(FrameError):
    """Initial frame fails the orthonormality requirement."""


class NotFrenetRegular(FrameError):
    """A Frenet curvature vanishes, so the Frenet frame does not exist."""


class Not2Regular(FrameError):
    """The tangent derivative vanishes somewhere on the grid."""


class BadNormalField(FrameError):
    """Principal normal data violates its defining relations."""


class ClearanceTooSmall(FrameError):
    """No projective direction with enough clearance from the coordinate curve."""


class NotOrthogonal(FrameError):
    """Matrix expected in O(3) is not orthogonal within tolerance."""


class NotTypeB(FrameError):
    """Operation requires a path whose coefficient matrix has Bishop shape."""


class NotTypeC(FrameError):
    """Operation requires a path classified as type C."""


class GridMismatch(FrameError):
    """Two frame paths do not share the same parameter grid."""


class TangentMismatch(FrameError):
    """Two frame paths disagree on the tangent row."""
