"""Exception types shared across the package."""


class DistvarError(Exception):
    """Base class for all library errors."""


class ZeroPolynomial(DistvarError):
    """Root extraction requested for the zero polynomial."""


class SingularInterpolation(DistvarError):
    """Interpolation nodes coincide or the tensor Vandermonde is singular."""


class PoleHit(DistvarError):
    """Evaluation point collides with a pole of a rational expression."""


class NotUnitaryColligation(DistvarError):
    """Block matrix [[A,B],[C,D]] fails the unitarity test."""


class NotPureRealization(DistvarError):
    """State matrix A has an eigenvalue on or outside the unit circle."""


class ResolventSingular(DistvarError):
    """I - zA is numerically singular at the requested point."""


class SpuriousFactorInDisc(DistvarError):
    """The cleared denominator of a variety polynomial vanishes on the closed disc."""


class NonCommuting(DistvarError):
    """Commutator norm exceeds tolerance."""


class NotContractive(DistvarError):
    """Operator norm exceeds 1 beyond tolerance."""


class NotPure(DistvarError):
    """Spectral radius is not strictly below 1 where pureness is required."""


class TruncationNotConverged(DistvarError):
    """A geometric truncation failed to reach its tail tolerance within the cap."""


class TriangularizationFailed(DistvarError):
    """No generic combination produced a joint upper-triangular form."""


class NoInnerSolution(DistvarError):
    """The inner-completion search exhausted its budget without success."""


class AnnTrivial(DistvarError):
    """The univariate annihilator is trivial, so the model space is infinite-dimensional."""


class DegenerateCluster(DistvarError):
    """Spectral clusters are too close for a conclusive tolerance-based decision."""


class ConstantSymbol(DistvarError):
    """A non-constant symbol is required."""


class DenominatorVanishes(DistvarError):
    """Rational symbol denominator vanishes on the sampled set."""
