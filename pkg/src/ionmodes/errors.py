"""Exception types raised by the simulator."""


class IonModesError(Exception):
    """Base class for all simulator errors."""


class InvalidDimensionError(IonModesError, ValueError):
    """A truncation or operator dimension is invalid or mismatched."""


class OccupationError(IonModesError, ValueError):
    """A requested Fock occupation lies outside the truncated space."""


class TruncationError(IonModesError):
    """Norm lost to the Fock cutoff exceeds the allowed budget.

    ``sector`` is the largest total-excitation sector that carried the lost
    weight, when known.
    """

    def __init__(self, message, leakage=None, sector=None):
        super().__init__(message)
        self.leakage = leakage
        self.sector = sector


class DegenerateStateError(IonModesError, ValueError):
    """A superposition cancelled to (numerically) zero norm."""


class UndefinedPhaseError(IonModesError, ValueError):
    """A relative phase was requested against a vanishing amplitude."""


class OracleFailureError(IonModesError, RuntimeError):
    """The matrix-exponential oracle produced a non-finite or non-unitary result."""
