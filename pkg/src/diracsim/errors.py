"""Exception types shared across the package.

Validation failures subclass ValueError so callers that only care about
"bad input" can catch that; numerical failures subclass ArithmeticError.
"""


class DiracSimError(Exception):
    """Base class for all package-specific errors."""


class InvalidDimensionError(DiracSimError, ValueError):
    """Hilbert-space dimension is zero, negative, or inconsistent."""


class DimensionMismatchError(DiracSimError, ValueError):
    """Two objects that must share a dimension do not."""


class StateValidationError(DiracSimError, ValueError):
    """Base class for density/pure-state invariant violations."""


class NotHermitianError(StateValidationError):
    """Matrix is not equal to its conjugate transpose within tolerance."""


class TraceNotOneError(StateValidationError):
    """Matrix trace differs from one beyond tolerance."""


class NotPositiveError(StateValidationError):
    """Matrix has an eigenvalue below the PSD floor."""


class NotNormalizedError(StateValidationError):
    """Pure-state amplitudes or a pointer wavefunction are not unit-norm."""


class DistributionValidationError(DiracSimError, ValueError):
    """Quasi-probability array violates its normalization/marginal invariants."""


class UndefinedWeakValueError(DiracSimError, ArithmeticError):
    """Post-selection probability is vanishingly small; the conditional
    average does not exist (physical blow-up, not a numerical bug)."""


class DegenerateInputError(DiracSimError, ValueError):
    """Input vector is identically zero where a direction is required."""


class NonHermitianCouplingError(DiracSimError, ValueError):
    """Coupling Hamiltonians must be Hermitian; weak measurement of a
    non-Hermitian product is realized with two Hermitian couplings."""


class CalibrationError(DiracSimError, ArithmeticError):
    """Pointer response fit failed; coupling too strong or grid too coarse."""


class ReconstructionError(DiracSimError, ArithmeticError):
    """Linear inversion of a quasi-probability array produced a matrix that
    fails density validation beyond the allowed slack."""


class RankDeficiencyError(DiracSimError, ArithmeticError):
    """Measurement set is not informationally complete for linear inversion."""


class InternalCheckError(DiracSimError, ArithmeticError):
    """Two algebraically equivalent routes disagreed beyond tolerance."""


class FileFormatError(DiracSimError, ValueError):
    """On-disk artifact is malformed or violates a schema invariant."""


class MissingKeyError(FileFormatError):
    """A required configuration key is absent."""

    def __init__(self, key: str):
        self.key = key
        super().__init__(f"missing required config key: {key!r}")
