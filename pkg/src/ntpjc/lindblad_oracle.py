"""Brute-force master-equation integrator on the truncated bare basis.

This module is the validation path: no secular approximation, no dressed
bookkeeping.  The density matrix lives on the product basis
|atom> x |n1> x |n2> (atom index 0 = excited, 1 = ground), ordered row-major
as (atom, n1, n2), and evolves under the full zero-temperature master
equation with equal damping of both modes.

Integration happens in the frame co-rotating with the free evolution at
(omega1, omega2, omega1 + omega2).  There the coherent part reduces to the
time-independent operator delta*Rz + g(a1 a2 R+ + h.c.), the dissipator is
unchanged, and the stiff optical frequencies drop out entirely.  Expectation
values of photon-number and atomic-population operators are frame-invariant;
``a1``, ``a1sq`` and ``sminus``/``splus`` come out directly as the
slowly-varying amplitudes (the free phases exp(-i omega1 t) etc. removed),
which is the form every squeezing formula consumes.

The integrator is a classical fixed-step 4th-order Runge-Kutta scheme: run
twice with the same inputs and you get bit-identical output.  The density
matrix is re-symmetrized after every step and the trace is checked against
drift at every sample time.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dressed_basis import DressedIndex, ModelParams, dressed_amplitudes, rabi_frequency
from .errors import OracleSizeError, TraceDriftError, ValidationError
from .initial_state import coherent_amplitudes

#: hard guard on the truncated mode space: (N1+1)(N2+1) states per atom level
MAX_MODE_STATES = 400

TRACE_TOLERANCE = 1e-8

#: observable ids -> description (complex-valued ones marked)
OBSERVABLE_IDS = (
    "N1",       # <a1+ a1>
    "N2",       # <a2+ a2>
    "Re",       # excited-state population
    "Rg",       # ground-state population
    "sigma3",   # <Re - Rg>
    "a1",       # slowly-varying <a1> (complex)
    "a2",       # slowly-varying <a2> (complex)
    "a1sq",     # slowly-varying <a1^2> (complex)
    "a2sq",     # slowly-varying <a2^2> (complex)
    "sminus",   # co-rotating <R-> (complex)
    "splus",    # co-rotating <R+> (complex)
    "n1fact2",  # <a1+^2 a1^2>
    "n2fact2",  # <a2+^2 a2^2>
    "trace",
)


@dataclass(frozen=True)
class BareDensity:
    """Dense density matrix on the truncated bare basis."""

    data: np.ndarray
    cutoff: tuple[int, int]

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def tensor(self) -> np.ndarray:
        """View shaped (2, N1+1, N2+1, 2, N1+1, N2+1)."""
        m1 = self.cutoff[0] + 1
        m2 = self.cutoff[1] + 1
        return self.data.reshape(2, m1, m2, 2, m1, m2)


def _guard_cutoff(cutoff: tuple[int, int]) -> None:
    n1_max, n2_max = cutoff
    if n1_max < 0 or n2_max < 0:
        raise ValidationError("cutoff must be nonnegative")
    states = (n1_max + 1) * (n2_max + 1)
    if states > MAX_MODE_STATES:
        raise OracleSizeError(
            f"cutoff {cutoff} needs {states} mode states per atom level; "
            f"the brute-force path is limited to {MAX_MODE_STATES}"
        )


def basis_index(atom: int, n1: int, n2: int, cutoff: tuple[int, int]) -> int:
    """Row-major index of |atom, n1, n2> (atom 0 = excited)."""
    if atom not in (0, 1):
        raise ValidationError("atom index must be 0 (excited) or 1 (ground)")
    if not (0 <= n1 <= cutoff[0] and 0 <= n2 <= cutoff[1]):
        raise ValidationError("photon labels outside the cutoff")
    return (atom * (cutoff[0] + 1) + n1) * (cutoff[1] + 1) + n2


def build_hamiltonian(p: ModelParams, cutoff: tuple[int, int]) -> np.ndarray:
    """Full lab-frame Hamiltonian (dense, real symmetric)."""
    _guard_cutoff(cutoff)
    m1, m2 = cutoff[0] + 1, cutoff[1] + 1
    dim = 2 * m1 * m2
    h = np.zeros((dim, dim))
    n1 = np.arange(m1, dtype=float)[:, None]
    n2 = np.arange(m2, dtype=float)[None, :]
    free = p.omega1 * n1 + p.omega2 * n2
    diag = np.concatenate(
        ((free + 0.5 * p.omega0).ravel(), (free - 0.5 * p.omega0).ravel())
    )
    np.fill_diagonal(h, diag)
    for i in range(m1 - 1):
        for j in range(m2 - 1):
            row = basis_index(0, i, j, cutoff)
            col = basis_index(1, i + 1, j + 1, cutoff)
            h[row, col] = h[col, row] = p.g * math.sqrt((i + 1) * (j + 1))
    return h


def coherent_excited_bare(p: ModelParams, cutoff: tuple[int, int]) -> BareDensity:
    """|e> x |alpha1> x |alpha2| as a bare density matrix (real alpha_i)."""
    _guard_cutoff(cutoff)
    from .initial_state import _check_tail

    _check_tail(p.nbar1, cutoff[0], "mode 1")
    _check_tail(p.nbar2, cutoff[1], "mode 2")
    m1, m2 = cutoff[0] + 1, cutoff[1] + 1
    vec = np.zeros(2 * m1 * m2)
    amps = np.outer(coherent_amplitudes(p.nbar1, cutoff[0]),
                    coherent_amplitudes(p.nbar2, cutoff[1]))
    vec[: m1 * m2] = amps.ravel()
    vec /= np.linalg.norm(vec)  # renormalize the truncated state to trace 1
    return BareDensity(data=np.outer(vec, vec).astype(complex), cutoff=cutoff)


def fock_excited_bare(
    p: ModelParams, n1: int, n2: int, cutoff: tuple[int, int]
) -> BareDensity:
    """|e, n1, n2><e, n1, n2| as a bare density matrix."""
    _guard_cutoff(cutoff)
    dim = 2 * (cutoff[0] + 1) * (cutoff[1] + 1)
    rho = np.zeros((dim, dim), dtype=complex)
    k = basis_index(0, n1, n2, cutoff)
    rho[k, k] = 1.0
    return BareDensity(data=rho, cutoff=cutoff)


def dressed_state_vector(
    idx: DressedIndex, p: ModelParams, cutoff: tuple[int, int]
) -> np.ndarray:
    """Bare-basis amplitudes of one dressed state (for projection tests)."""
    if idx.n1 + 1 > cutoff[0] or idx.n2 + 1 > cutoff[1]:
        raise ValidationError("dressed state does not fit inside the cutoff")
    amp_e, amp_g = dressed_amplitudes(idx, p)
    vec = np.zeros(2 * (cutoff[0] + 1) * (cutoff[1] + 1))
    vec[basis_index(0, idx.n1, idx.n2, cutoff)] = amp_e
    vec[basis_index(1, idx.n1 + 1, idx.n2 + 1, cutoff)] = amp_g
    return vec


class _Rhs:
    """Master-equation right-hand side in the co-rotating frame.

    Works on the (2, M1, M2, 2, M1, M2) tensor view; every term is a slice
    product, so the cost per call is linear in the number of matrix entries.
    Assumes a Hermitian argument (maintained by the integrator), which lets
    the commutator be formed from a single one-sided product.
    """

    def __init__(self, p: ModelParams, cutoff: tuple[int, int]):
        m1, m2 = cutoff[0] + 1, cutoff[1] + 1
        self.half_delta = 0.5 * p.delta
        self.kappa = p.kappa
        n1 = np.arange(m1 - 1, dtype=float)[:, None]
        n2 = np.arange(m2 - 1, dtype=float)[None, :]
        # coupling strength on the (n1, n2) <-> (n1+1, n2+1) pair
        self.coup = (p.g * np.sqrt((n1 + 1.0) * (n2 + 1.0)))[:, :, None, None, None]
        if p.kappa > 0:
            w1 = np.sqrt(np.arange(1, m1, dtype=float))
            w2 = np.sqrt(np.arange(1, m2, dtype=float))
            self.w1_pair = w1.reshape(1, -1, 1, 1, 1, 1) * w1.reshape(1, 1, 1, 1, -1, 1)
            self.w2_pair = w2.reshape(1, 1, -1, 1, 1, 1) * w2.reshape(1, 1, 1, 1, 1, -1)
            ns = np.arange(m1, dtype=float)[:, None] + np.arange(m2, dtype=float)[None, :]
            self.loss = (
                ns.reshape(1, m1, m2, 1, 1, 1) + ns.reshape(1, 1, 1, 1, m1, m2)
            )

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        b = np.empty_like(rho)
        np.multiply(rho[0], +self.half_delta, out=b[0])
        np.multiply(rho[1], -self.half_delta, out=b[1])
        b[0][:-1, :-1] += self.coup * rho[1][1:, 1:]
        b[1][1:, 1:] += self.coup * rho[0][:-1, :-1]
        out = b - b.conj().transpose(3, 4, 5, 0, 1, 2)
        out *= -1j
        if self.kappa > 0:
            out -= self.kappa * (self.loss * rho)
            out[:, :-1, :, :, :-1, :] += (2.0 * self.kappa) * (
                rho[:, 1:, :, :, 1:, :] * self.w1_pair
            )
            out[:, :, :-1, :, :, :-1] += (2.0 * self.kappa) * (
                rho[:, :, 1:, :, :, 1:] * self.w2_pair
            )
        return out


def default_step(p: ModelParams, cutoff: tuple[int, int]) -> float:
    """Step size keeping dt * ||H_rot|| <= 0.05 and damping well resolved."""
    h_norm = rabi_frequency(cutoff[0], cutoff[1], p)
    dt = 0.05 / h_norm
    if p.kappa > 0:
        dt = min(dt, 0.1 / (2.0 * p.kappa * (cutoff[0] + cutoff[1] + 2)))
    return dt


def _check_grid(t_grid: np.ndarray) -> np.ndarray:
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1:
        raise ValidationError("t_grid must be a 1-d array of times")
    if t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise ValidationError("t_grid must start at 0 and increase strictly")
    return t_grid


def _propagate(rho0, p, cutoff, t_grid, dt, on_sample):
    rhs = _Rhs(p, cutoff)
    m1, m2 = cutoff[0] + 1, cutoff[1] + 1
    y = rho0.reshape(2, m1, m2, 2, m1, m2).copy()
    trace0 = float(np.einsum("aijaij->", y).real)
    on_sample(0, y)
    for j in range(len(t_grid) - 1):
        span = t_grid[j + 1] - t_grid[j]
        nsub = max(1, math.ceil(span / dt))
        h = span / nsub
        for _ in range(nsub):
            k1 = rhs(y)
            k2 = rhs(y + (0.5 * h) * k1)
            k3 = rhs(y + (0.5 * h) * k2)
            k4 = rhs(y + h * k3)
            y += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            y += y.conj().transpose(3, 4, 5, 0, 1, 2)
            y *= 0.5
        drift = abs(float(np.einsum("aijaij->", y).real) - trace0)
        if drift > TRACE_TOLERANCE:
            raise TraceDriftError(
                f"trace drifted by {drift:.3e} at t={t_grid[j + 1]:g}; "
                f"rerun with a smaller dt (current {dt:g})"
            )
        on_sample(j + 1, y)


def integrate(
    rho0: BareDensity,
    p: ModelParams,
    t_grid,
    dt: float | None = None,
) -> list[BareDensity]:
    """Density matrices at each grid time (co-rotating frame).

    Memory grows with len(t_grid) * dim^2; prefer ``integrate_observed`` for
    long scans.
    """
    t_grid = _check_grid(t_grid)
    _guard_cutoff(rho0.cutoff)
    if dt is None:
        dt = default_step(p, rho0.cutoff)
    elif dt * rabi_frequency(rho0.cutoff[0], rho0.cutoff[1], p) > 0.05:
        warnings.warn("dt * ||H|| > 0.05; integration accuracy may suffer", stacklevel=2)
    dim = rho0.dim
    out: list[BareDensity] = []

    def keep(_j, y):
        out.append(BareDensity(data=y.reshape(dim, dim).copy(), cutoff=rho0.cutoff))

    _propagate(rho0.data, p, rho0.cutoff, t_grid, dt, keep)
    return out


def integrate_observed(
    rho0: BareDensity,
    p: ModelParams,
    t_grid,
    ids: tuple[str, ...],
    dt: float | None = None,
) -> dict[str, np.ndarray]:
    """Expectation values along the run without storing the states."""
    t_grid = _check_grid(t_grid)
    _guard_cutoff(rho0.cutoff)
    for obs_id in ids:
        if obs_id not in OBSERVABLE_IDS:
            raise ValidationError(f"unknown oracle observable {obs_id!r}")
    if dt is None:
        dt = default_step(p, rho0.cutoff)
    complex_ids = {"a1", "a2", "a1sq", "a2sq", "sminus", "splus"}
    res = {
        obs_id: np.empty(len(t_grid), dtype=complex if obs_id in complex_ids else float)
        for obs_id in ids
    }

    def record(j, y):
        for obs_id in ids:
            res[obs_id][j] = _expect_tensor(y, obs_id)

    _propagate(rho0.data, p, rho0.cutoff, t_grid, dt, record)
    return res


def _expect_tensor(r: np.ndarray, obs_id: str):
    m1, m2 = r.shape[1], r.shape[2]
    if obs_id in ("N1", "N2", "Re", "Rg", "sigma3", "n1fact2", "n2fact2", "trace"):
        d = np.einsum("aijaij->aij", r).real
        if obs_id == "N1":
            return float(np.tensordot(d.sum(axis=(0, 2)), np.arange(m1), axes=1))
        if obs_id == "N2":
            return float(np.tensordot(d.sum(axis=(0, 1)), np.arange(m2), axes=1))
        if obs_id == "Re":
            return float(d[0].sum())
        if obs_id == "Rg":
            return float(d[1].sum())
        if obs_id == "sigma3":
            return float(d[0].sum() - d[1].sum())
        if obs_id == "n1fact2":
            n = np.arange(m1, dtype=float)
            return float(np.tensordot(d.sum(axis=(0, 2)), n * (n - 1), axes=1))
        if obs_id == "n2fact2":
            n = np.arange(m2, dtype=float)
            return float(np.tensordot(d.sum(axis=(0, 1)), n * (n - 1), axes=1))
        return float(d.sum())
    if obs_id == "a1":
        # Tr(rho a1) = sum sqrt(i+1) <i+1|rho|i> on the first mode
        z = np.einsum("aijaij->aij", r[:, 1:, :, :, : m1 - 1, :])
        return complex(np.tensordot(z.sum(axis=(0, 2)), np.sqrt(np.arange(1, m1)), axes=1))
    if obs_id == "a2":
        z = np.einsum("aijaij->aij", r[:, :, 1:, :, :, : m2 - 1])
        return complex(np.tensordot(z.sum(axis=(0, 1)), np.sqrt(np.arange(1, m2)), axes=1))
    if obs_id == "a1sq":
        z = np.einsum("aijaij->aij", r[:, 2:, :, :, : m1 - 2, :])
        w = np.sqrt(np.arange(1, m1 - 1) * np.arange(2, m1))
        return complex(np.tensordot(z.sum(axis=(0, 2)), w, axes=1))
    if obs_id == "a2sq":
        z = np.einsum("aijaij->aij", r[:, :, 2:, :, :, : m2 - 2])
        w = np.sqrt(np.arange(1, m2 - 1) * np.arange(2, m2))
        return complex(np.tensordot(z.sum(axis=(0, 1)), w, axes=1))
    if obs_id == "sminus":
        return complex(np.einsum("ijij->", r[0, :, :, 1, :, :]))
    if obs_id == "splus":
        return complex(np.einsum("ijij->", r[1, :, :, 0, :, :]))
    raise ValidationError(f"unknown oracle observable {obs_id!r}")


def expectation(rho: BareDensity, obs_id: str):
    """Expectation value in a stored state; see OBSERVABLE_IDS for the list."""
    if obs_id not in OBSERVABLE_IDS:
        raise ValidationError(f"unknown oracle observable {obs_id!r}")
    return _expect_tensor(rho.tensor(), obs_id)
