"""Expectation values from dressed-picture density data.

All fast time dependence of the stored density data lives in explicit phase
factors: each coherence between eigenstates split by a Rabi gap oscillates at
that gap, while the optical carrier frequencies cancel out of every quantity
computed here (slow field amplitudes are defined in frames co-rotating with
their mode, the dipole in the frame of the atomic transition).  A single
snapshot plus a time argument therefore yields expectations in closed form,
without reconstructing a bare-basis matrix.
"""

from __future__ import annotations

import warnings

import numpy as np

from .dressed_basis import BRANCH_MINUS, BRANCH_PLUS, ModelParams, gamma_table, rabi_table
from .errors import DegenerateMeanPhotonError, InversionNodeError, ValidationError

OBSERVABLE_NAMES = (
    "N1",
    "N2",
    "Re",
    "Rg",
    "sigma3",
    "G2_1",
    "G2_2",
    "S1",
    "S2",
    "F1",
    "F2",
)

#: mean photon number below which normalized correlations are refused
DEGENERATE_TOL = 1e-12
#: inversion magnitude below which dipole squeezing is refused
NODE_TOL = 1e-9

_TABLE_CACHE: dict = {}


def _tables(p: ModelParams, cutoff: tuple[int, int]):
    """(Omega, gamma_plus, gamma_minus) grids, cached per (g, delta, cutoff)."""
    key = (p.g, p.delta, cutoff)
    hit = _TABLE_CACHE.get(key)
    if hit is None:
        if len(_TABLE_CACHE) > 128:
            _TABLE_CACHE.clear()
        hit = (
            rabi_table(p, cutoff),
            gamma_table(p, cutoff, BRANCH_PLUS),
            gamma_table(p, cutoff, BRANCH_MINUS),
        )
        _TABLE_CACHE[key] = hit
    return hit


def _mode_counts(w, mode: int) -> np.ndarray:
    m1, m2 = w.cutoff[0] + 1, w.cutoff[1] + 1
    if mode == 1:
        return np.arange(m1, dtype=float)[:, None]
    if mode == 2:
        return np.arange(m2, dtype=float)[None, :]
    raise ValidationError("mode must be 1 or 2")


def _block_re(w, t: float, p: ModelParams) -> float:
    """sum gamma+ gamma- Re(<+|W|-> e^{-2i Omega t}) over all blocks."""
    omega, gp, gm = _tables(p, w.cutoff)
    return float(np.sum(gp * gm * np.real(w.block_coh * np.exp(-2j * omega * t))))


def atomic_populations(w, t: float, p: ModelParams) -> tuple[float, float]:
    """(excited, ground) probabilities; they sum to the trace."""
    _, gp, gm = _tables(p, w.cutoff)
    cross = _block_re(w, t, p)
    re = 0.5 * float(np.sum(gp**2 * w.diag_plus + gm**2 * w.diag_minus)) + cross
    rg = (
        0.5 * float(np.sum(gm**2 * w.diag_plus + gp**2 * w.diag_minus))
        - cross
        + w.dark_total()
    )
    return re, rg


def inversion(w, t: float, p: ModelParams) -> float:
    re, rg = atomic_populations(w, t, p)
    return re - rg


def mean_photon(w, t: float, p: ModelParams, mode: int = 1) -> float:
    _, gp, gm = _tables(p, w.cutoff)
    counts = _mode_counts(w, mode)
    diag = np.sum(
        (counts + 0.5 * gm**2) * w.diag_plus + (counts + 0.5 * gp**2) * w.diag_minus
    )
    dark = w.dark1 if mode == 1 else w.dark2
    dark_part = float(np.dot(np.arange(len(dark), dtype=float), dark))
    return float(diag) - _block_re(w, t, p) + dark_part


def second_factorial_moment(w, t: float, p: ModelParams, mode: int = 1) -> float:
    """<N (N - 1)> of the chosen mode."""
    omega, gp, gm = _tables(p, w.cutoff)
    counts = _mode_counts(w, mode)
    ratio = p.delta / (2.0 * omega)
    diag = np.sum(
        (counts**2 - counts * ratio) * w.diag_plus
        + (counts**2 + counts * ratio) * w.diag_minus
    )
    cross = np.sum(
        2.0 * counts * gp * gm * np.real(w.block_coh * np.exp(-2j * omega * t))
    )
    dark = w.dark1 if mode == 1 else w.dark2
    ms = np.arange(len(dark), dtype=float)
    return float(diag - cross + np.dot(ms * (ms - 1.0), dark))


def second_order_correlation(w, t: float, p: ModelParams, mode: int = 1) -> float:
    """(<N(N-1)> - <N>^2) / <N>^2; -1/n for an n-photon Fock field."""
    nbar = mean_photon(w, t, p, mode)
    if nbar <= DEGENERATE_TOL:
        raise DegenerateMeanPhotonError(
            f"mode {mode} mean photon number {nbar:.3e} is too small to "
            "normalize the correlation"
        )
    return (second_factorial_moment(w, t, p, mode) - nbar**2) / nbar**2


def _mode_view(w, p: ModelParams, mode: int, power: int):
    """Tables and coherence family oriented so the shifted axis comes first."""
    omega, gp, gm = _tables(p, w.cutoff)
    if mode == 1:
        fam = w.cross[(power, 0)]
        return omega, {BRANCH_PLUS: gp, BRANCH_MINUS: gm}, fam, w.cutoff[0] + 1
    if mode == 2:
        fam = {pair: a.T for pair, a in w.cross[(0, power)].items()}
        gam = {BRANCH_PLUS: gp.T, BRANCH_MINUS: gm.T}
        return omega.T, gam, fam, w.cutoff[1] + 1
    raise ValidationError("mode must be 1 or 2")


def slow_amplitude(w, t: float, p: ModelParams, mode: int = 1) -> complex:
    """<a_i> in the frame rotating at that mode's frequency."""
    omega, gam, fam, m_ax = _mode_view(w, p, mode, power=1)
    if m_ax < 2:
        return 0j
    s1 = np.sqrt(np.arange(1.0, m_ax))[:, None]
    s2 = np.sqrt(np.arange(2.0, m_ax + 1))[:, None]
    total = 0j
    for (bu, bl), arr in fam.items():
        amp = 0.5 * (
            gam[bl][:-1, :] * gam[bu][1:, :] * s1
            + (bu * bl) * gam[-bl][:-1, :] * gam[-bu][1:, :] * s2
        )
        phase = np.exp(1j * t * (bl * omega[:-1, :] - bu * omega[1:, :]))
        total += np.sum(amp * phase * arr[:-1, :])
    return complex(total)


def slow_amplitude_squared(w, t: float, p: ModelParams, mode: int = 1) -> complex:
    """<a_i^2> in the doubled rotating frame of that mode."""
    omega, gam, fam, m_ax = _mode_view(w, p, mode, power=2)
    if m_ax < 3:
        return 0j
    s1 = np.sqrt(np.arange(1.0, m_ax - 1))[:, None]
    s2 = np.sqrt(np.arange(2.0, m_ax))[:, None]
    s3 = np.sqrt(np.arange(3.0, m_ax + 1))[:, None]
    total = 0j
    for (bu, bl), arr in fam.items():
        amp = 0.5 * s2 * (
            gam[bl][:-2, :] * gam[bu][2:, :] * s1
            + (bu * bl) * gam[-bl][:-2, :] * gam[-bu][2:, :] * s3
        )
        phase = np.exp(1j * t * (bl * omega[:-2, :] - bu * omega[2:, :]))
        total += np.sum(amp * phase * arr[:-2, :])
    return complex(total)


def slow_dipole(w, t: float, p: ModelParams) -> complex:
    """<R+> in the frame rotating at the atomic transition frequency.

    Starts at exactly zero for the excited-atom initial states (the two
    raising-branch terms cancel pairwise) and grows as the branches dephase.
    """
    omega, gp, gm = _tables(p, w.cutoff)
    gam = {BRANCH_PLUS: gp, BRANCH_MINUS: gm}
    if w.cutoff[0] < 1 or w.cutoff[1] < 1:
        return 0j
    total = 0j
    for (bu, bl), arr in w.cross[(1, 1)].items():
        coeff = 0.5 * bl * gam[bu][1:, 1:] * gam[-bl][:-1, :-1]
        phase = np.exp(1j * t * (bu * omega[1:, 1:] - bl * omega[:-1, :-1]))
        total += np.sum(coeff * phase * np.conj(arr[:-1, :-1]))
    return complex(np.exp(-1j * p.delta * t) * total)


def _warn_if_block_diagonal(w, what: str) -> None:
    if w.init_mode == "block-diagonal":
        warnings.warn(
            f"{what} requires inter-block coherences, which the "
            "block-diagonal initial state discards; result is the "
            "coherence-free baseline",
            stacklevel=3,
        )


def field_squeezing(
    w, t: float, p: ModelParams, quadrature: int = 1, mode: int = 1
) -> float:
    """Variance of the chosen slow quadrature of one mode; vacuum gives 1."""
    if quadrature not in (1, 2):
        raise ValidationError("quadrature must be 1 or 2")
    _warn_if_block_diagonal(w, "field squeezing")
    amp = slow_amplitude(w, t, p, mode)
    amp2 = slow_amplitude_squared(w, t, p, mode)
    nbar = mean_photon(w, t, p, mode)
    if quadrature == 1:
        return float(2.0 * amp2.real + 2.0 * nbar - (2.0 * amp.real) ** 2 + 1.0)
    return float(-2.0 * amp2.real + 2.0 * nbar - (2.0 * amp.imag) ** 2 + 1.0)


def atomic_dipole_squeezing(w, t: float, p: ModelParams) -> tuple[float, float, float]:
    """(F1, F2, inversion); F_i < 1 flags squeezing of dipole quadrature i.

    Undefined where the inversion crosses zero, hence the node error.
    """
    re, rg = atomic_populations(w, t, p)
    s3 = re - rg
    if abs(s3) <= NODE_TOL:
        raise InversionNodeError(
            f"inversion {s3:.3e} at t = {t:g} is below {NODE_TOL:g}; the "
            "squeezing criterion is undefined at inversion nodes"
        )
    _warn_if_block_diagonal(w, "dipole squeezing")
    d = slow_dipole(w, t, p)
    f1 = (1.0 - 4.0 * d.real**2) / abs(s3)
    f2 = (1.0 - 4.0 * d.imag**2) / abs(s3)
    return f1, f2, s3


def evaluate(w, t: float, p: ModelParams, names) -> dict[str, float]:
    """Evaluate the named observables at one time; see OBSERVABLE_NAMES."""
    out: dict[str, float] = {}
    pops: tuple[float, float] | None = None
    dipole: tuple[float, float, float] | None = None
    for name in names:
        if name not in OBSERVABLE_NAMES:
            raise ValidationError(f"unknown observable {name!r}")
        if name in ("Re", "Rg", "sigma3"):
            if pops is None:
                pops = atomic_populations(w, t, p)
            out[name] = {
                "Re": pops[0],
                "Rg": pops[1],
                "sigma3": pops[0] - pops[1],
            }[name]
        elif name in ("N1", "N2"):
            out[name] = mean_photon(w, t, p, mode=int(name[1]))
        elif name in ("G2_1", "G2_2"):
            out[name] = second_order_correlation(w, t, p, mode=int(name[3]))
        elif name in ("S1", "S2"):
            out[name] = field_squeezing(w, t, p, quadrature=int(name[1]), mode=1)
        else:
            if dipole is None:
                dipole = atomic_dipole_squeezing(w, t, p)
            out[name] = dipole[0] if name == "F1" else dipole[1]
    return out
