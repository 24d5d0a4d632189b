"""Dressed-state structure of the two-mode two-photon atom-field model.

A two-level atom exchanges excitation with two cavity modes through the
two-photon coupling g (a1 a2 R+ + a1+ a2+ R-).  The coupling connects the
bare pair {|e, n1, n2>, |g, n1+1, n2+1>} and nothing else, so the lossless
Hamiltonian splits into 2x2 blocks labelled by (n1, n2).  Each block
diagonalizes into an upper/lower branch pair split by the generalized Rabi
frequency Omega(n1, n2); the mixing is captured by the branch amplitudes
gamma+/gamma-.

Ground states with either mode empty, |g, m, 0> and |g, 0, m>, are not
reached by the coupling.  They are exact eigenstates (dark states) and only
participate through photon damping.

Conventions: g > 0 sets the unit of frequency (time is measured as g*t),
delta = omega0 - omega1 - omega2 is the two-photon detuning, and the branch
sign +1/-1 selects the upper/lower dressed state.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

BRANCH_PLUS = 1
BRANCH_MINUS = -1
DARK_SIDES = ("mode1", "mode2", "origin")


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of a run.

    g: two-photon coupling (> 0); all rates are quoted in units of g.
    delta: two-photon detuning omega0 - omega1 - omega2.
    kappa: damping rate of each cavity mode (equal for both, zero temperature).
    nbar1, nbar2: mean photon numbers of the initial coherent fields.
    omega1, omega2: absolute mode frequencies.  They only enter the bare
        eigenenergies; every observable produced here is independent of them.
        omega0 is derived as omega1 + omega2 + delta.
    """

    g: float = 1.0
    delta: float = 0.0
    kappa: float = 0.0
    nbar1: float = 0.0
    nbar2: float = 0.0
    omega1: float = 100.0
    omega2: float = 100.0

    def __post_init__(self):
        for name in ("g", "delta", "kappa", "nbar1", "nbar2", "omega1", "omega2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
        if self.g <= 0:
            raise ValidationError(f"g must be positive, got {self.g!r}")
        if self.kappa < 0:
            raise ValidationError(f"kappa must be >= 0, got {self.kappa!r}")
        if self.nbar1 < 0 or self.nbar2 < 0:
            raise ValidationError("mean photon numbers must be >= 0")
        if abs(self.delta) > 0.5 * min(self.omega1, self.omega2):
            warnings.warn(
                "detuning is not small against the mode frequencies; the "
                "rotating-wave model is outside its usual regime",
                stacklevel=2,
            )

    @property
    def omega0(self) -> float:
        return self.omega1 + self.omega2 + self.delta


@dataclass(frozen=True)
class DressedIndex:
    """Label of one dressed state: block (n1, n2), branch +1 (upper) or -1 (lower)."""

    n1: int
    n2: int
    branch: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValidationError("block labels must be >= 0")
        if self.branch not in (BRANCH_PLUS, BRANCH_MINUS):
            raise ValidationError("branch must be +1 or -1")


@dataclass(frozen=True)
class DarkIndex:
    """Label of one dark state: |g, m, 0> (mode1), |g, 0, m> (mode2) or |g, 0, 0>."""

    side: str
    m: int

    def __post_init__(self):
        if self.side not in DARK_SIDES:
            raise ValidationError(f"side must be one of {DARK_SIDES}")
        if self.side == "origin":
            if self.m != 0:
                raise ValidationError("the origin dark state has m = 0")
        elif self.m < 1:
            raise ValidationError("axis dark states have m >= 1")

    @property
    def photons(self) -> tuple[int, int]:
        if self.side == "mode1":
            return (self.m, 0)
        if self.side == "mode2":
            return (0, self.m)
        return (0, 0)


def rabi_frequency(n1: int, n2: int, p: ModelParams) -> float:
    """Generalized Rabi frequency Omega of block (n1, n2)."""
    if n1 < 0 or n2 < 0:
        raise ValidationError("block labels must be >= 0")
    return math.sqrt(0.25 * p.delta**2 + p.g**2 * (n1 + 1) * (n2 + 1))


def detuning_ratio(n1: int, n2: int, p: ModelParams) -> float:
    """delta / Omega(n1, n2); small when the block is deep in the resonant regime."""
    return p.delta / rabi_frequency(n1, n2, p)


def gamma(n1: int, n2: int, branch: int, p: ModelParams) -> float:
    """Branch amplitude gamma(+/-) = sqrt(1 +/- delta / (2 Omega)).

    Satisfies gamma+^2 + gamma-^2 = 2 and
    gamma+ * gamma- = g sqrt((n1+1)(n2+1)) / Omega.
    """
    if branch not in (BRANCH_PLUS, BRANCH_MINUS):
        raise ValidationError("branch must be +1 or -1")
    ratio = 0.5 * p.delta / rabi_frequency(n1, n2, p)
    return math.sqrt(max(0.0, 1.0 + branch * ratio))


def dressed_amplitudes(idx: DressedIndex, p: ModelParams) -> tuple[float, float]:
    """Bare-basis amplitudes (on |e, n1, n2>, on |g, n1+1, n2+1>) of a dressed state."""
    g_same = gamma(idx.n1, idx.n2, idx.branch, p)
    g_anti = gamma(idx.n1, idx.n2, -idx.branch, p)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    return (g_same * inv_sqrt2, idx.branch * g_anti * inv_sqrt2)


def eigen_energy(idx: DressedIndex, p: ModelParams) -> float:
    """Absolute eigenenergy: omega1 (n1 + 1/2) + omega2 (n2 + 1/2) +/- Omega."""
    phi = p.omega1 * (idx.n1 + 0.5) + p.omega2 * (idx.n2 + 0.5)
    return phi + idx.branch * rabi_frequency(idx.n1, idx.n2, p)


def rabi_table(p: ModelParams, cutoff: tuple[int, int]) -> np.ndarray:
    """Omega on the full (N1+1, N2+1) block grid."""
    n1 = np.arange(cutoff[0] + 1, dtype=float)[:, None]
    n2 = np.arange(cutoff[1] + 1, dtype=float)[None, :]
    return np.sqrt(0.25 * p.delta**2 + p.g**2 * (n1 + 1.0) * (n2 + 1.0))


def gamma_table(p: ModelParams, cutoff: tuple[int, int], branch: int) -> np.ndarray:
    """gamma(branch) on the full block grid."""
    if branch not in (BRANCH_PLUS, BRANCH_MINUS):
        raise ValidationError("branch must be +1 or -1")
    ratio = 0.5 * p.delta / rabi_table(p, cutoff)
    return np.sqrt(np.clip(1.0 + branch * ratio, 0.0, None))
