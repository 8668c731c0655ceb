"""Exception types shared across the package."""


class ScsynthError(Exception):
    """Base class for all package-specific errors."""


class SpecError(ScsynthError, ValueError):
    """A problem document is malformed or violates a structural invariant.

    ``location`` points at the offending element (JSON-ish path) when known.
    """

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ConfigError(ScsynthError, ValueError):
    """Incompatible generator/solver configuration (e.g. bad sequence length)."""


class InfeasibleError(ScsynthError):
    """An imported assignment violates the constraint system.

    ``constraint`` names the first violated constraint, ``detail`` carries
    the evaluated left-hand side and the bound it broke.
    """

    def __init__(self, constraint: str, detail: str):
        self.constraint = constraint
        self.detail = detail
        super().__init__(f"constraint {constraint} violated: {detail}")


class VerificationError(ScsynthError):
    """Internal consistency check failed (solver result vs. simulator)."""
