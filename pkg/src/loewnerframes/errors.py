"""Exception hierarchy shared by all modules."""


class LoewnerError(Exception):
    """Base class for every error raised by the package."""


class InvalidCurveError(LoewnerError, ValueError):
    """Curve parameters are invalid or the sampled curve is not a Jordan curve."""


class NonUnivalentError(InvalidCurveError):
    """A Taylor map has a vanishing derivative on the closed disk."""


class CurveThroughOriginError(InvalidCurveError):
    """The curve passes through (or encloses incorrectly) the origin."""


class PoleInputError(LoewnerError, ValueError):
    """Stereographic projection of the north pole."""


class SolverError(LoewnerError):
    """Base class for conformal-map solver failures."""


class NotStarLikeError(SolverError):
    """The curve is not star-like with respect to the requested center."""


class NoConvergenceError(SolverError):
    """The fixed-point iteration did not reach the tolerance."""


class MismatchedCurveError(SolverError):
    """Two maps that should describe the same curve do not."""


class QuadratureError(LoewnerError):
    """Base class for integration failures."""


class NonFiniteSampleError(QuadratureError):
    """An integrand produced a NaN or infinity at a quadrature node."""

    def __init__(self, node, value):
        super().__init__(f"non-finite integrand value {value!r} at node {node!r}")
        self.node = node
        self.value = value


class DomainError(LoewnerError, ValueError):
    """A point or parameter lies outside the domain of an operation."""


class OutOfRadiusError(DomainError):
    pass


class OriginInputError(DomainError):
    pass


class VanishingDerivativeError(DomainError):
    pass


class NonzeroCenterError(DomainError):
    """An operation requires f(0) = 0."""


class DegenerateMapError(DomainError):
    pass
