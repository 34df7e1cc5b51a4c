"""Exception hierarchy shared by all modules."""


class LameError(Exception):
    """Base class for every error raised by this package."""


class DegenerateCubic(LameError):
    """The cubic has (numerically) repeated roots, i.e. the curve is singular."""


class RootLost(LameError):
    """Newton refinement of an algebraic number failed or became ambiguous."""


class InsufficientPrecision(LameError):
    """The working precision is too low for the requested recognition."""


class NearSingular(LameError):
    """An expansion point lies (numerically) on a singular point."""


class OutsideDisk(LameError):
    """A series was evaluated outside its safe evaluation disk."""


class PathCollision(LameError):
    """A loop could not be routed around the other singular points."""


class NoBracket(LameError):
    """No sign-changing bracket for the real objective was found."""


class Stalled(LameError):
    """Directional descent shrank its step to round-off without converging."""


class SchemaError(LameError):
    """A catalog or curve file does not follow the expected layout."""

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row!r}: {message}"
        super().__init__(message)
