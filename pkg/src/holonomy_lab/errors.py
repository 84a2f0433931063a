"""Exception hierarchy shared by all modules."""


class HolonomyError(Exception):
    """Base class for every error raised by holonomy_lab."""


class NumericalBreakdown(HolonomyError):
    """A computation left the regime where its result is well defined."""


class CutLocus(NumericalBreakdown):
    """Logarithm requested at (or numerically too close to) the cut locus.

    ``value`` carries the geodesic distance of the antipodal point when it is
    known, so callers can still report a number next to the failure.
    """

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class SingularInput(NumericalBreakdown):
    pass


class OutOfChart(HolonomyError):
    pass


class StepCountTooSmall(HolonomyError):
    pass


class PathNotClosed(HolonomyError):
    pass


class EndpointMismatch(HolonomyError):
    pass


class RadiusOutOfRange(HolonomyError):
    pass


class WrongGroup(HolonomyError):
    pass


class ChartNotBox(HolonomyError):
    pass


class DirectionNotUnit(HolonomyError):
    pass


class OutOfDisk(HolonomyError):
    pass


class FillingMissing(HolonomyError):
    pass


class ConfigError(HolonomyError):
    """Malformed scenario configuration; ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key


class CheckFailed(HolonomyError):
    pass
