"""Initial density matrices in the dressed representation.

The physical preparation is an excited atom and two independent coherent
fields with real amplitudes sqrt(nbar_i).  Projected on the dressed basis
this state touches only the |e, n1, n2> component of each block, so every
matrix element factorizes into branch amplitudes times coherent-state
amplitudes.

Two representations are supported:

* ``full-coherence`` keeps, besides the block populations and the intra-block
  (+,-) coherence, the inter-block coherences at offsets (1,0), (2,0), (0,1),
  (0,2) and (1,1).  Those are exactly the elements read by the field
  amplitude/quadrature and atomic dipole observables.
* ``block-diagonal`` drops all inter-block coherences.  Photon numbers,
  atomic populations and normalized photon correlations are unaffected;
  quadrature and dipole squeezing lose their physical meaning in this mode.

Both store dark-state populations (zero initially: the atom starts excited).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .dressed_basis import (
    BRANCH_MINUS,
    BRANCH_PLUS,
    DarkIndex,
    DressedIndex,
    ModelParams,
    gamma_table,
)
from .errors import CutoffTooSmallError, ValidationError

#: stored inter-block coherence offsets (d1, d2): element <Psi_{n+d} | W | Psi_n>
CROSS_OFFSETS = ((1, 0), (2, 0), (0, 1), (0, 2), (1, 1))
BRANCH_PAIRS = (
    (BRANCH_PLUS, BRANCH_PLUS),
    (BRANCH_PLUS, BRANCH_MINUS),
    (BRANCH_MINUS, BRANCH_PLUS),
    (BRANCH_MINUS, BRANCH_MINUS),
)
INIT_MODES = ("full-coherence", "block-diagonal")

#: largest tolerated Poisson weight beyond the photon-number cutoff
TAIL_TOLERANCE = 1e-8


def poisson_weight(nbar: float, n: int) -> float:
    """Photon-number distribution of a coherent state with mean nbar."""
    if nbar < 0:
        raise ValidationError("nbar must be >= 0")
    if n < 0:
        raise ValidationError("n must be >= 0")
    if nbar == 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(-nbar + n * math.log(nbar) - math.lgamma(n + 1))


def coherent_amplitudes(nbar: float, nmax: int) -> np.ndarray:
    """Fock amplitudes <n|alpha> of a coherent state with real alpha = sqrt(nbar)."""
    if nbar < 0:
        raise ValidationError("nbar must be >= 0")
    n = np.arange(nmax + 1, dtype=float)
    if nbar == 0.0:
        amps = np.zeros(nmax + 1)
        amps[0] = 1.0
        return amps
    from scipy.special import gammaln

    return np.exp(-0.5 * nbar + 0.5 * n * math.log(nbar) - 0.5 * gammaln(n + 1.0))


def default_cutoff(nbar1: float, nbar2: float) -> tuple[int, int]:
    """Photon-number truncation wide enough for a vanishing Poisson tail."""

    def one(nbar: float) -> int:
        return math.ceil(nbar + 8.0 * math.sqrt(max(nbar, 1.0)) + 10.0)

    return (one(nbar1), one(nbar2))


def _check_tail(nbar: float, n_max: int, label: str) -> None:
    tail = float(stats.poisson.sf(n_max, nbar)) if nbar > 0 else 0.0
    if tail >= TAIL_TOLERANCE:
        raise CutoffTooSmallError(
            f"cutoff {n_max} leaves Poisson tail {tail:.3e} >= {TAIL_TOLERANCE:g} "
            f"for {label} with nbar={nbar}; use at least {default_cutoff(nbar, 0)[0]}"
        )


@dataclass(frozen=True)
class DressedDensity:
    """Density matrix in the dressed representation.

    diag_plus/diag_minus: block populations, shape (N1+1, N2+1).
    block_coh: intra-block coherence <Psi+ | W | Psi->, complex, same shape.
    cross: inter-block coherences; ``cross[(d1, d2)][(bu, bl)]`` holds
        <Psi^bu_{n1+d1, n2+d2} | W | Psi^bl_{n1, n2}> on the block grid
        (entries outside the valid region, where the upper block would
        exceed the cutoff, are zero).
    dark1/dark2: dark populations indexed by photon number m (entry 0 unused),
        lengths N1+2 and N2+2; dark_origin is |g, 0, 0>.
    """

    cutoff: tuple[int, int]
    diag_plus: np.ndarray
    diag_minus: np.ndarray
    block_coh: np.ndarray
    cross: dict
    dark1: np.ndarray
    dark2: np.ndarray
    dark_origin: float
    init_mode: str = "full-coherence"

    def trace(self) -> float:
        return float(
            self.diag_plus.sum()
            + self.diag_minus.sum()
            + self.dark1[1:].sum()
            + self.dark2[1:].sum()
            + self.dark_origin
        )

    def dark_total(self) -> float:
        return float(self.dark1[1:].sum() + self.dark2[1:].sum() + self.dark_origin)

    def diag(self, idx: DressedIndex) -> float:
        arr = self.diag_plus if idx.branch == BRANCH_PLUS else self.diag_minus
        return float(arr[idx.n1, idx.n2])

    def dark(self, idx: DarkIndex) -> float:
        if idx.side == "origin":
            return float(self.dark_origin)
        arr = self.dark1 if idx.side == "mode1" else self.dark2
        return float(arr[idx.m])

    def coherence(self, mi: DressedIndex, ni: DressedIndex) -> complex:
        """Stored element <Psi_mi | W | Psi_ni> (either orientation)."""
        if (mi.n1, mi.n2) == (ni.n1, ni.n2):
            if mi.branch == ni.branch:
                return complex(self.diag(mi))
            value = complex(self.block_coh[mi.n1, mi.n2])
            return value if mi.branch == BRANCH_PLUS else value.conjugate()
        d = (mi.n1 - ni.n1, mi.n2 - ni.n2)
        if d in self.cross:
            return complex(self.cross[d][(mi.branch, ni.branch)][ni.n1, ni.n2])
        d_rev = (-d[0], -d[1])
        if d_rev in self.cross:
            return complex(
                self.cross[d_rev][(ni.branch, mi.branch)][mi.n1, mi.n2]
            ).conjugate()
        raise KeyError(f"coherence between blocks offset {d} is not stored")


def _zero_cross(shape: tuple[int, int]) -> dict:
    return {
        d: {pair: np.zeros(shape, dtype=complex) for pair in BRANCH_PAIRS}
        for d in CROSS_OFFSETS
    }


def coherent_excited(
    p: ModelParams,
    cutoff: tuple[int, int] | None = None,
    mode: str = "full-coherence",
) -> DressedDensity:
    """Excited atom with coherent fields of mean photon numbers p.nbar1, p.nbar2."""
    if mode not in INIT_MODES:
        raise ValidationError(f"mode must be one of {INIT_MODES}, got {mode!r}")
    if cutoff is None:
        cutoff = default_cutoff(p.nbar1, p.nbar2)
    n1_max, n2_max = cutoff
    if n1_max < 0 or n2_max < 0:
        raise ValidationError("cutoff must be nonnegative")
    _check_tail(p.nbar1, n1_max, "mode 1")
    _check_tail(p.nbar2, n2_max, "mode 2")

    shape = (n1_max + 1, n2_max + 1)
    gp = gamma_table(p, cutoff, BRANCH_PLUS)
    gm = gamma_table(p, cutoff, BRANCH_MINUS)
    # renormalized on the truncated grid so the trace is exactly 1
    c1 = coherent_amplitudes(p.nbar1, n1_max)
    c1 /= np.linalg.norm(c1)
    c2 = coherent_amplitudes(p.nbar2, n2_max)
    c2 /= np.linalg.norm(c2)
    pop = np.outer(c1**2, c2**2)

    diag_plus = 0.5 * gp**2 * pop
    diag_minus = 0.5 * gm**2 * pop
    block_coh = (0.5 * gp * gm * pop).astype(complex)

    cross = _zero_cross(shape)
    if mode == "full-coherence":
        gam = {BRANCH_PLUS: gp, BRANCH_MINUS: gm}
        for d1, d2 in CROSS_OFFSETS:
            # coherent cross weight c_{n1+d1} c_{n1} c_{n2+d2} c_{n2}
            w1 = c1[d1:] * c1[: len(c1) - d1]
            w2 = c2[d2:] * c2[: len(c2) - d2]
            weight = np.outer(w1, w2)
            for bu, bl in BRANCH_PAIRS:
                upper = gam[bu][d1:, d2:] if (d1 or d2) else gam[bu]
                lower = gam[bl][: shape[0] - d1, : shape[1] - d2]
                block = 0.5 * upper * lower * weight
                arr = cross[(d1, d2)][(bu, bl)]
                arr[: shape[0] - d1, : shape[1] - d2] = block

    return DressedDensity(
        cutoff=cutoff,
        diag_plus=diag_plus,
        diag_minus=diag_minus,
        block_coh=block_coh,
        cross=cross,
        dark1=np.zeros(n1_max + 2),
        dark2=np.zeros(n2_max + 2),
        dark_origin=0.0,
        init_mode=mode,
    )


def fock_excited(
    p: ModelParams,
    n1: int,
    n2: int,
    cutoff: tuple[int, int] | None = None,
) -> DressedDensity:
    """Excited atom with both modes in number states |n1>, |n2>."""
    if n1 < 0 or n2 < 0:
        raise ValidationError("Fock labels must be >= 0")
    if cutoff is None:
        cutoff = (n1 + 2, n2 + 2)
    if cutoff[0] < n1 or cutoff[1] < n2:
        raise CutoffTooSmallError(
            f"cutoff {cutoff} cannot hold the Fock state ({n1}, {n2})"
        )
    shape = (cutoff[0] + 1, cutoff[1] + 1)
    gp = gamma_table(p, cutoff, BRANCH_PLUS)[n1, n2]
    gm = gamma_table(p, cutoff, BRANCH_MINUS)[n1, n2]

    diag_plus = np.zeros(shape)
    diag_minus = np.zeros(shape)
    block_coh = np.zeros(shape, dtype=complex)
    diag_plus[n1, n2] = 0.5 * gp**2
    diag_minus[n1, n2] = 0.5 * gm**2
    block_coh[n1, n2] = 0.5 * gp * gm

    return DressedDensity(
        cutoff=cutoff,
        diag_plus=diag_plus,
        diag_minus=diag_minus,
        block_coh=block_coh,
        cross=_zero_cross(shape),
        dark1=np.zeros(cutoff[0] + 2),
        dark2=np.zeros(cutoff[1] + 2),
        dark_origin=0.0,
        init_mode="full-coherence",
    )
