"""Exception hierarchy shared by all entsus modules."""


class EntsusError(Exception):
    """Base class for all library errors."""


class InputError(EntsusError):
    """Malformed or inconsistent input (bad supports, dimension mismatch, ...)."""


class CapacityError(EntsusError):
    """Requested object exceeds a configured memory cap."""


class DegenerateGroundStateError(EntsusError):
    """Ground state is (numerically) degenerate; perturbative formulas do not apply."""


class GaplessError(EntsusError):
    """A gap / invertibility precondition failed (singular Z, vanishing gap)."""


class StabilityError(EntsusError):
    """Bosonic coupling matrix is not positive definite."""


class NumericalConsistencyError(EntsusError):
    """An internal cross-check failed beyond tolerance; result untrustworthy."""


class ConfigError(EntsusError):
    """Invalid configuration; carries the offending key path."""

    def __init__(self, key_path: str, message: str):
        self.key_path = key_path
        super().__init__(f"{key_path}: {message}")


class FitError(EntsusError):
    """Least-squares fit could not be performed (rank deficiency, too few points)."""
