"""Exception hierarchy for minkhelix."""


class MinkHelixError(Exception):
    """Base class for all library errors."""


class NonFiniteError(MinkHelixError, ValueError):
    """A vector with NaN or Inf entries was passed to an operation."""


class DomainError(MinkHelixError, ValueError):
    """Parameter outside the domain of a curve or profile."""


class OrderError(MinkHelixError, ValueError):
    """Requested derivative order is not available."""


class UnknownCurve(MinkHelixError, KeyError):
    pass


class FormatError(MinkHelixError, ValueError):
    """Malformed tabulated data or JSON spec."""


class LightlikeTangent(MinkHelixError):
    """The tangent vector is (numerically) lightlike."""


class VanishingCurvature(MinkHelixError):
    pass


class VanishingTorsion(MinkHelixError):
    pass


class DegenerateBranch(MinkHelixError):
    """tau^2 - kappa^2 vanishes, so the slant-helix function is undefined."""


class NotSpherical(MinkHelixError):
    pass


class BadInitialFrame(MinkHelixError, ValueError):
    pass


class UnsupportedCase(MinkHelixError, ValueError):
    pass


class PoleProximity(DomainError):
    """Tan-family profile evaluated too close to a pole."""


class GridTooCoarse(MinkHelixError, ValueError):
    pass


class InsufficientSamples(MinkHelixError):
    pass


class SingularSystem(MinkHelixError, ArithmeticError):
    pass
