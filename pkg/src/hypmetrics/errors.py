"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-contract input (bad dimensions, counts, selectors)."""


class PunctureDomainError(InputError):
    """A point sits at distance zero from a puncture, where the punctured
    metrics are genuinely undefined."""
