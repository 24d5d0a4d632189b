"""Exception types shared across the package.

The CLI maps these onto exit codes: validation problems exit 2, refused
oversized computations exit 3, numerical failures exit 4.
"""

from __future__ import annotations


class ValidationError(ValueError):
    """Bad user input: parameters, config files, observable names."""


class CutoffTooSmallError(ValidationError):
    """Photon-number truncation leaves more than the allowed Poisson tail."""


class DegenerateMeanPhotonError(ValidationError):
    """Normalized correlation requested for a mode with ~zero mean photon number."""


class CostGuardError(RuntimeError):
    """Computation refused because it exceeds a hard size guard."""


class OracleSizeError(CostGuardError):
    """Brute-force density-matrix run refused: truncated space too large."""


class NumericalError(RuntimeError):
    """Integration diagnostics failed; results would not be trustworthy."""


class StepSizeError(NumericalError):
    """Fixed-step integration failed its refinement check."""

    def __init__(self, message: str, suggested_dt: float | None = None):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class TraceDriftError(NumericalError):
    """Density-matrix trace drifted beyond tolerance during integration."""


class InversionNodeError(NumericalError):
    """Dipole squeezing undefined: atomic inversion is at a node."""
