"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter lies outside the range where the computation is defined."""


class DimensionError(ValueError):
    """Array shapes of a loss matrix, prior, likelihood or rule disagree."""


class ZeroEvidenceError(ValueError):
    """The observed outcome has probability zero under every hypothesis."""


class UnreachableError(ValueError):
    """A requested target value cannot be attained by any parameter."""
