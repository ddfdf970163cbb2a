"""Exception types raised across the package."""


class MactError(Exception):
    """Base class for all library errors."""


class UnknownApproximant(MactError):
    """No bundled coefficient set exists for the requested function/degree."""


class DegenerateDenominator(MactError):
    """A rational's denominator vanished (|q(x)| below threshold)."""


class NotConverged(MactError):
    """Remez iteration exhausted its iteration budget without converging."""


class IllConditioned(MactError):
    """The linear system for the approximant coefficients was numerically singular."""


class UndefinedAngle(MactError):
    """An angle is undefined for this input (e.g. arctan(g/r) with r = g = 0)."""


class CacheMissing(MactError):
    """Caching interpolation was requested on a LUT without a prebuilt cache."""


class DegenerateAngle(MactError):
    """Angular interpolation hit a vanishing weighted direction vector."""


class CorpusEmpty(MactError):
    """A benchmark was requested over an empty image corpus."""


class PpmError(MactError):
    """Base class for PPM I/O failures."""


class MalformedHeader(PpmError):
    """The PPM header could not be parsed (magic, dimensions, or maxval)."""


class UnsupportedMaxval(PpmError):
    """Only 8-bit (maxval 255) PPM images are supported."""


class TruncatedData(PpmError):
    """The PPM pixel payload is shorter than the header promises."""
