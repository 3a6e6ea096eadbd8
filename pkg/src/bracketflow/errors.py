"""Exception types shared across the package."""


class BracketFlowError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(BracketFlowError):
    """Operands live on incompatible split spaces or have wrong shapes."""


class SingularOperatorError(BracketFlowError):
    """An operator that must be invertible is singular or too ill-conditioned."""


class DegenerateStructureError(BracketFlowError):
    """A geometric structure fails its nondegeneracy requirement."""


class NotApplicableError(BracketFlowError):
    """A flow or operation was requested outside its domain of validity."""


class ConfigError(BracketFlowError):
    """A run configuration does not validate."""
