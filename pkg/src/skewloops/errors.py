"""Exception types raised by the skewloops toolkit."""


class SkewLoopError(Exception):
    """Base class for all toolkit errors."""


class PreconditionError(SkewLoopError, ValueError):
    """An operation was called on input that violates its precondition."""


class NonzeroMean(SkewLoopError):
    """Antiderivative requested for a function with nonzero mean."""


class ZeroVelocity(SkewLoopError):
    """Tantrix or defect requested where the velocity vanishes."""


class Unsupported(SkewLoopError):
    """Operation not available on this curve backend."""


class NotImmersed(SkewLoopError):
    """Speed bound of a curve could not be certified positive."""


class NotStrictlyConvex(SkewLoopError):
    """Radius of curvature ``v = h'' + h`` is not certified positive."""


class OddPartZero(SkewLoopError):
    """Odd part vanishes identically; the base oval is centrally symmetric."""


class SymmetricBase(OddPartZero):
    """Height construction requested over a symmetric oval."""


class Nonpositive(SkewLoopError):
    """``e + o`` is not certified positive."""


class ProjectionFailure(SkewLoopError):
    """Fourier projection hit the degree cap without certification."""


class FlatPoint(SkewLoopError):
    """Curvature lower bound could not be certified positive."""


class NotOnSurface(SkewLoopError):
    """Samples do not satisfy the defining equation of the surface."""


class NullVelocity(SkewLoopError):
    """Velocity is null or timelike for the Lorentzian form."""


class PoleCrossing(SkewLoopError):
    """Curve passes (numerically) through a pole of the (u, v) chart."""


class NotEmbedded(SkewLoopError):
    """Tantrix polyline crosses itself."""


class NotUnitSpeed(SkewLoopError):
    """Curve is not parametrized by arclength."""


class ZeroFactor(SkewLoopError, ValueError):
    """Stretch factor of zero."""


class TangentPlane(SkewLoopError):
    """Plane touches the quadric in a single point."""


class NoSignChange(SkewLoopError):
    """Root bracketing failed where existence is guaranteed; indicates a bug."""


class SingularMatrixWarning(UserWarning):
    """Affine map is singular; skewness is no longer guaranteed to be preserved."""
