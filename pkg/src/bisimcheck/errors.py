"""Exception types shared across the package."""


class BisimError(Exception):
    """Base class for all errors raised by bisimcheck."""


class ValidationError(BisimError):
    """A system, relation, map or process violates a structural invariant."""


class FormatError(BisimError):
    """A document cannot be parsed. Carries a 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GuardExceeded(BisimError):
    """An enumeration guard was hit; the input is too large for exact checking."""


class NotAnEquivalence(BisimError):
    """A relation fails an eligibility property (totality, surjectivity, z-closure).

    ``reason`` names the first failing property.
    """

    def __init__(self, reason):
        self.reason = reason
        super().__init__(f"relation is not usable as an equivalence: {reason}")
