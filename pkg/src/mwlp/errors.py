"""Exception hierarchy shared by all modules."""


class MwlpError(Exception):
    """Base class for all library errors."""


class NonHermitian(MwlpError):
    pass


class NotPositiveDefinite(MwlpError):
    pass


class NonFinite(MwlpError):
    pass


class SingularPoint(MwlpError):
    pass


class NonPositiveScale(MwlpError):
    pass


class EmptyFamily(MwlpError):
    pass


class ExponentOutOfRange(MwlpError):
    pass


class ZeroMass(MwlpError):
    pass


class EmptyBand(MwlpError):
    pass


class GridMismatch(MwlpError):
    pass


class OffsetNotOnGrid(MwlpError):
    pass


class BandTooLarge(MwlpError):
    pass


class BandViolation(MwlpError):
    pass


class ZeroNorm(MwlpError):
    pass


class Divergent(MwlpError):
    pass


class DivergentFit(MwlpError):
    pass


class HypothesisViolated(MwlpError):
    """The decay exponent does not clear the threshold required by the bound."""


class CoverageGap(MwlpError):
    pass


class DegenerateBump(MwlpError):
    pass


class ConfigInvalid(MwlpError):
    pass


class TruncationWarning(UserWarning):
    """Spectral mass falls outside the region covered by a dyadic partition."""
