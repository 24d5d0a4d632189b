"""Secular evolution in the dressed basis.

In the interaction picture generated by the full lossless Hamiltonian, the
density matrix changes only through the damping terms.  Dropping the terms
that oscillate at differences of Rabi frequencies (secular approximation)
decouples the problem:

* populations of dressed and dark states obey a linear cascade of rate
  equations; photon loss only ever moves weight toward blocks with fewer
  quanta, so the generator is triangular under a suitable ordering;
* every stored coherence decays exponentially on its own, at the mean of the
  two total outflow rates of the states it connects, with no oscillatory
  factor left.

The transition rates are golden-rule rates of the two loss channels,
rate = 2 kappa |<target| a_i |source>|^2 evaluated between dressed (or dark)
states.  Summing a state's outgoing rates gives its total decay
2 kappa (n1 + n2 + gamma_anti^2); this bookkeeping conserves the trace
exactly once the dark manifold is complete.  The intra-block coherence decay
2 kappa (n1 + n2 + 1) is precisely the branch average of those two totals.

Validity: the approximation needs the damping to stay slow against the Rabi
splitting over the populated blocks, roughly 2 k n^2 << g sqrt(n + 1) at the
truncation edge.  A warning (never an error) is issued when that is violated.

Dark-state manifolds: ``full`` tracks every |g, m, 0> and |g, 0, m> with the
photon cascade between them (rate 2 kappa m), which is what trace
conservation requires.  ``paper3`` keeps only the three states
|g,1,0>, |g,0,1>, |g,0,0> fed from the lowest block, a historically common
truncation that slowly leaks trace for spread-out fields.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .dressed_basis import (
    BRANCH_MINUS,
    BRANCH_PLUS,
    DarkIndex,
    DressedIndex,
    ModelParams,
    gamma_table,
)
from .errors import StepSizeError, ValidationError
from .initial_state import DressedDensity

MANIFOLDS = ("full", "paper3")

#: refinement-halving convergence tolerance for the population integrator
CONVERGENCE_TOL = 1e-8


def secular_validity_ratio(p: ModelParams, n: int) -> float:
    """2 k n^2 / (g sqrt(n+1)); the secular picture needs this << 1."""
    return 2.0 * p.kappa * n * n / (p.g * math.sqrt(n + 1.0))


@dataclass(frozen=True)
class RateGenerator:
    """Sparse rate matrix G with d(populations)/dt = G @ populations.

    Column sums vanish (full manifold), off-diagonal entries are rates >= 0,
    and flow strictly decreases the quantum content: ordering states by
    descending key (n1 + n2 + 1 for dressed blocks, m - 1/2 for dark states)
    makes G lower triangular.
    """

    matrix: sparse.csr_matrix
    cutoff: tuple[int, int]
    manifold: str
    params: ModelParams

    @property
    def n_states(self) -> int:
        return self.matrix.shape[0]

    def _blocks(self) -> int:
        return (self.cutoff[0] + 1) * (self.cutoff[1] + 1)

    def pack(self, w: DressedDensity) -> np.ndarray:
        """Population vector [diag+, diag-, dark1(m=1..), dark2(m=1..), origin]."""
        if w.cutoff != self.cutoff:
            raise ValidationError("density cutoff does not match the generator")
        return np.concatenate(
            (
                w.diag_plus.ravel(),
                w.diag_minus.ravel(),
                w.dark1[1:],
                w.dark2[1:],
                [w.dark_origin],
            )
        )

    def unpack(self, vec: np.ndarray):
        """Inverse of pack: (diag_plus, diag_minus, dark1, dark2, origin)."""
        m1, m2 = self.cutoff[0] + 1, self.cutoff[1] + 1
        nb = self._blocks()
        diag_plus = vec[:nb].reshape(m1, m2)
        diag_minus = vec[nb : 2 * nb].reshape(m1, m2)
        dark1 = np.zeros(m1 + 1)
        dark2 = np.zeros(m2 + 1)
        dark1[1:] = vec[2 * nb : 2 * nb + m1]
        dark2[1:] = vec[2 * nb + m1 : 2 * nb + m1 + m2]
        return diag_plus, diag_minus, dark1, dark2, float(vec[-1])

    def state_labels(self) -> list:
        """Labels in packing order (DressedIndex / DarkIndex)."""
        m1, m2 = self.cutoff[0] + 1, self.cutoff[1] + 1
        labels: list = [
            DressedIndex(i, j, BRANCH_PLUS) for i in range(m1) for j in range(m2)
        ]
        labels += [
            DressedIndex(i, j, BRANCH_MINUS) for i in range(m1) for j in range(m2)
        ]
        labels += [DarkIndex("mode1", m) for m in range(1, m1 + 1)]
        labels += [DarkIndex("mode2", m) for m in range(1, m2 + 1)]
        labels.append(DarkIndex("origin", 0))
        return labels

    def cascade_keys(self) -> np.ndarray:
        """Sort key per state; every transition strictly decreases it."""
        keys = []
        for lbl in self.state_labels():
            if isinstance(lbl, DressedIndex):
                keys.append(lbl.n1 + lbl.n2 + 1.0)
            else:
                keys.append(lbl.m - 0.5)
        return np.array(keys)


def build_generator(
    p: ModelParams,
    cutoff: tuple[int, int],
    manifold: str = "full",
) -> RateGenerator:
    """Assemble the population rate matrix for the given truncation."""
    if manifold not in MANIFOLDS:
        raise ValidationError(f"manifold must be one of {MANIFOLDS}")
    n1_max, n2_max = cutoff
    if n1_max < 0 or n2_max < 0:
        raise ValidationError("cutoff must be nonnegative")
    ratio = secular_validity_ratio(p, max(n1_max, n2_max))
    if ratio >= 1.0:
        warnings.warn(
            f"secular validity ratio 2kn^2/(g sqrt(n+1)) = {ratio:.2f} at the "
            "cutoff edge; rates there are outside the slow-damping regime",
            stacklevel=2,
        )

    m1, m2 = n1_max + 1, n2_max + 1
    nb = m1 * m2
    k = p.kappa
    idx = {
        BRANCH_PLUS: np.arange(nb).reshape(m1, m2),
        BRANCH_MINUS: nb + np.arange(nb).reshape(m1, m2),
    }
    dark1_ids = 2 * nb + np.arange(m1)          # m = 1 .. m1
    dark2_ids = 2 * nb + m1 + np.arange(m2)     # m = 1 .. m2
    origin_id = 2 * nb + m1 + m2
    n_states = origin_id + 1

    gam = {
        BRANCH_PLUS: gamma_table(p, cutoff, BRANCH_PLUS),
        BRANCH_MINUS: gamma_table(p, cutoff, BRANCH_MINUS),
    }
    n1g = np.arange(m1, dtype=float)[:, None]
    n2g = np.arange(m2, dtype=float)[None, :]

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    data: list[np.ndarray] = []

    def add(r, c, v):
        rows.append(np.asarray(r).ravel())
        cols.append(np.asarray(c).ravel())
        data.append(np.asarray(v).ravel())

    # total outflow 2k(n1 + n2 + gamma_anti^2) on each dressed diagonal
    for b in (BRANCH_PLUS, BRANCH_MINUS):
        anti = gam[-b]
        add(idx[b], idx[b], -2.0 * k * (n1g + n2g + anti**2))

    if k > 0:
        # dressed -> dressed photon loss, mode 1: (n1, n2) -> (n1 - 1, n2)
        s_lo = np.sqrt(np.arange(1, m1, dtype=float))[:, None]
        s_hi = np.sqrt(np.arange(2, m1 + 1, dtype=float))[:, None]
        for b in (BRANCH_PLUS, BRANCH_MINUS):
            for a in (BRANCH_PLUS, BRANCH_MINUS):
                amp = (
                    gam[a][:-1, :] * gam[b][1:, :] * s_lo
                    + (a * b) * gam[-a][:-1, :] * gam[-b][1:, :] * s_hi
                )
                add(idx[a][:-1, :], idx[b][1:, :], 0.5 * k * amp**2)
        # mode 2: (n1, n2) -> (n1, n2 - 1)
        s_lo = np.sqrt(np.arange(1, m2, dtype=float))[None, :]
        s_hi = np.sqrt(np.arange(2, m2 + 1, dtype=float))[None, :]
        for b in (BRANCH_PLUS, BRANCH_MINUS):
            for a in (BRANCH_PLUS, BRANCH_MINUS):
                amp = (
                    gam[a][:, :-1] * gam[b][:, 1:] * s_lo
                    + (a * b) * gam[-a][:, :-1] * gam[-b][:, 1:] * s_hi
                )
                add(idx[a][:, :-1], idx[b][:, 1:], 0.5 * k * amp**2)

        # leakage off the block grid into dark states:
        # (0, n2) loses a mode-1 photon -> |g, 0, n2+1>;
        # (n1, 0) loses a mode-2 photon -> |g, n1+1, 0>
        for b in (BRANCH_PLUS, BRANCH_MINUS):
            anti = gam[-b]
            if manifold == "full":
                add(dark2_ids, idx[b][0, :], k * anti[0, :] ** 2)
                add(dark1_ids, idx[b][:, 0], k * anti[:, 0] ** 2)
            else:
                add([dark2_ids[0]], [idx[b][0, 0]], [k * anti[0, 0] ** 2])
                add([dark1_ids[0]], [idx[b][0, 0]], [k * anti[0, 0] ** 2])

        # dark cascade |g, m, 0> -> |g, m-1, 0> at 2 k m (and to the origin)
        if manifold == "full":
            for ids, m_count in ((dark1_ids, m1), (dark2_ids, m2)):
                ms = np.arange(1, m_count + 1, dtype=float)
                add(ids, ids, -2.0 * k * ms)
                if m_count > 1:
                    add(ids[:-1], ids[1:], 2.0 * k * ms[1:])
                add([origin_id], [ids[0]], [2.0 * k])
        else:
            for ids in (dark1_ids, dark2_ids):
                add([ids[0]], [ids[0]], [-2.0 * k])
                add([origin_id], [ids[0]], [2.0 * k])

    matrix = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_states, n_states),
    ).tocsr()
    return RateGenerator(matrix=matrix, cutoff=cutoff, manifold=manifold, params=p)


def _rk4_linear(matrix, y0, t_grid, dt_max):
    y = y0.copy()
    out = np.empty((len(t_grid), len(y0)))
    out[0] = y
    for j in range(len(t_grid) - 1):
        span = t_grid[j + 1] - t_grid[j]
        nsub = max(1, math.ceil(span / dt_max))
        h = span / nsub
        for _ in range(nsub):
            k1 = matrix @ y
            k2 = matrix @ (y + (0.5 * h) * k1)
            k3 = matrix @ (y + (0.5 * h) * k2)
            k4 = matrix @ (y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        out[j + 1] = y
    return out


def default_population_step(gen: RateGenerator) -> float:
    """k dt <= 1e-3 and the fastest decay rate well inside the stable region."""
    k = gen.params.kappa
    if k <= 0:
        return math.inf
    max_rate = float(np.abs(gen.matrix.diagonal()).max())
    dt = 1e-3 / k
    if max_rate > 0:
        dt = min(dt, 0.2 / max_rate)
    return dt


def evolve_populations(
    w0: DressedDensity,
    gen: RateGenerator,
    t_grid,
    dt: float | None = None,
    convergence_check: bool = True,
) -> np.ndarray:
    """Populations at each grid time, shape (len(t_grid), n_states).

    Fixed-step RK4 on the packed vector; with ``convergence_check`` the run
    is repeated at half the step and must agree to CONVERGENCE_TOL.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1:
        raise ValidationError("t_grid must be a 1-d array of times")
    if t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise ValidationError("t_grid must start at 0 and increase strictly")
    y0 = gen.pack(w0)
    if gen.params.kappa == 0:
        return np.tile(y0, (len(t_grid), 1))
    if dt is None:
        dt = default_population_step(gen)
    out = _rk4_linear(gen.matrix, y0, t_grid, dt)
    if convergence_check:
        refined = _rk4_linear(gen.matrix, y0, t_grid, 0.5 * dt)
        err = float(np.abs(out - refined).max())
        if err > CONVERGENCE_TOL:
            raise StepSizeError(
                f"population integration not converged (changed by {err:.3e} "
                f"under step halving); retry with dt <= {dt / 4:g}",
                suggested_dt=dt / 4,
            )
        out = refined
    low, high = float(out.min()), float(out.max())
    if low < -1e-9 or high > 1.0 + 1e-9:
        raise StepSizeError(
            f"populations left [0, 1] (min {low:.3e}, max {high:.3e}); "
            "reduce dt",
            suggested_dt=(dt or 0.0) / 4,
        )
    return out


def coherence_decay_rate(m: DressedIndex, n: DressedIndex, kappa: float) -> float:
    """Secular decay rate of <Psi_m | W | Psi_n>: k (m1 + m2 + n1 + n2 + 2).

    Mean of the two states' photon-loss rates with each state counting
    n1 + n2 + 1 quanta; the intra-block pair gives exactly 2 k (n1 + n2 + 1).
    Feeding of coherences from higher blocks is neglected alongside the other
    oscillatory dissipator terms, so this decay (unlike the population
    cascade) is an approximation even within its own validity window.
    """
    return kappa * (m.n1 + m.n2 + n.n1 + n.n2 + 2.0)


def offdiag_value(
    element0: complex,
    m: DressedIndex,
    n: DressedIndex,
    kappa: float,
    t: float,
) -> complex:
    """Coherence <Psi_m | W | Psi_n> at time t given its initial value."""
    if t < 0:
        raise ValidationError("t must be >= 0")
    return element0 * math.exp(-coherence_decay_rate(m, n, kappa) * t)


def _cross_decay_tables(p: ModelParams, cutoff: tuple[int, int]) -> dict:
    """Decay-rate arrays (per family, branch-independent) on the block grid."""
    from .initial_state import CROSS_OFFSETS

    m1, m2 = cutoff[0] + 1, cutoff[1] + 1
    n1g = np.arange(m1, dtype=float)[:, None]
    n2g = np.arange(m2, dtype=float)[None, :]
    out: dict = {"block": 2.0 * p.kappa * (n1g + n2g + 1.0)}
    for d1, d2 in CROSS_OFFSETS:
        v1, v2 = m1 - d1, m2 - d2
        full = np.zeros((m1, m2))
        full[:v1, :v2] = p.kappa * (2.0 * (n1g[:v1, :] + n2g[:, :v2]) + d1 + d2 + 2.0)
        out[(d1, d2)] = full
    return out


def iter_evolve(
    w0: DressedDensity,
    p: ModelParams,
    t_grid,
    manifold: str = "full",
    dt: float | None = None,
    convergence_check: bool = True,
):
    """Yield the state at each grid time, one snapshot in memory at a time.

    Populations come from the rate-equation cascade, stored coherences from
    their closed-form exponential decay; nothing else moves in this picture.
    """
    gen = build_generator(p, w0.cutoff, manifold)
    pops = evolve_populations(w0, gen, t_grid, dt=dt, convergence_check=convergence_check)
    rates = _cross_decay_tables(p, w0.cutoff)
    for j, t in enumerate(np.asarray(t_grid, dtype=float)):
        diag_plus, diag_minus, dark1, dark2, origin = gen.unpack(pops[j])
        cross = {
            d: {
                pair: w0.cross[d][pair] * np.exp(-rates[d] * t)
                for pair in w0.cross[d]
            }
            for d in w0.cross
        }
        yield DressedDensity(
            cutoff=w0.cutoff,
            diag_plus=diag_plus,
            diag_minus=diag_minus,
            block_coh=w0.block_coh * np.exp(-rates["block"] * t),
            cross=cross,
            dark1=dark1,
            dark2=dark2,
            dark_origin=origin,
            init_mode=w0.init_mode,
        )


def evolve(
    w0: DressedDensity,
    p: ModelParams,
    t_grid,
    manifold: str = "full",
    dt: float | None = None,
    convergence_check: bool = True,
) -> list[DressedDensity]:
    """Secular evolution at each grid time; see iter_evolve for the streaming form."""
    return list(
        iter_evolve(
            w0, p, t_grid, manifold, dt=dt, convergence_check=convergence_check
        )
    )
