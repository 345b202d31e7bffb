"""Exception types shared across the package."""


class BergmanError(Exception):
    """Base class for all package errors."""


class DomainError(BergmanError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class IntegrabilityError(BergmanError):
    """A radial weight (or measure density) has a divergent tail integral."""


class ResourceLimitError(BergmanError):
    """A requested grid or lattice would exceed the configured size bounds."""


class SelfMapViolationError(BergmanError):
    """A purported self-map of the disc produced values outside the closed disc."""


class DegenerateBasepointError(BergmanError):
    """A Carleson-square mass underflowed, so a normalized test object is undefined."""


class UnboundedNormError(BergmanError):
    """A norm computation kept growing under grid refinement."""


class ConfigError(BergmanError):
    """An experiment configuration failed validation."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

    def payload(self):
        out = {"type": "config", "message": str(self)}
        if self.field is not None:
            out["field"] = self.field
        return out
