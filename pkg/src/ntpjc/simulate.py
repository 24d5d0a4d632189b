"""Run configuration, the simulation driver, and the brute-force cross-check.

``simulate`` evolves the dressed-picture model and evaluates observables on a
uniform time grid.  ``oracle_series`` computes the same observables from a
direct density-matrix integration that shares no code path with the dressed
solver beyond the initial-state coefficients, and ``oracle_check`` compares
the two, which is the standard way to validate a parameter regime before
trusting long secular runs there.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from . import lindblad_oracle, observables, secular_solver
from .dressed_basis import ModelParams
from .errors import InversionNodeError, ValidationError
from .initial_state import INIT_MODES, coherent_excited, default_cutoff
from .observables import NODE_TOL, OBSERVABLE_NAMES
from .secular_solver import MANIFOLDS

DEFAULT_OBSERVABLES = ("Re", "Rg", "N1", "N2")

#: solver-vs-oracle agreement thresholds, per observable
#: per-observable gates for the equivalence check, calibrated on the worst
#: slow-damping regime the check is promised for (nbar <= 2, k <= 0.02,
#: gt <= 25).  Population-sector quantities track the brute-force run
#: closely.  The quadrature variances S1/S2 inherit the stored-coherence
#: approximation (exponential decay with no feeding from higher blocks), so
#: their damped gates are loose by design; in the lossless limit they agree
#: to 1e-6 like everything else.
ORACLE_TOLERANCES = {
    "Re": 0.05,
    "Rg": 0.05,
    "sigma3": 0.1,
    "N1": 0.1,
    "N2": 0.1,
    "G2_1": 0.05,
    "G2_2": 0.05,
    "S1": 2.5,
    "S2": 1.5,
    "F1": 0.1,
    "F2": 0.1,
}

#: dipole-squeezing samples with |inversion| below this are not compared.
#: F divides by |sigma3|, so a deviation d in the inversion inflates the F
#: comparison by ~d/sigma3^2; 0.6 keeps that amplification within the gate
#: for the calibrated sigma3 agreement.
NODE_EXCLUSION = 0.6


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one time-series run."""

    nbar1: float = 0.0
    nbar2: float = 0.0
    delta: float = 0.0
    kappa: float = 0.0
    g: float = 1.0
    tmax: float = 25.0
    samples: int = 501
    cutoff: tuple[int, int] | None = None
    observables: tuple[str, ...] = DEFAULT_OBSERVABLES
    init_mode: str = "full-coherence"
    manifold: str = "full"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.tmax) and self.tmax > 0):
            raise ValidationError("tmax must be positive")
        if self.samples < 2:
            raise ValidationError("samples must be at least 2")
        if self.init_mode not in INIT_MODES:
            raise ValidationError(f"init_mode must be one of {INIT_MODES}")
        if self.manifold not in MANIFOLDS:
            raise ValidationError(f"manifold must be one of {MANIFOLDS}")
        if not self.observables:
            raise ValidationError("at least one observable is required")
        for name in self.observables:
            if name not in OBSERVABLE_NAMES:
                raise ValidationError(
                    f"unknown observable {name!r}; choices: {OBSERVABLE_NAMES}"
                )
        if self.cutoff is not None:
            c1, c2 = self.cutoff
            if c1 < 0 or c2 < 0:
                raise ValidationError("cutoff entries must be nonnegative")

    @property
    def params(self) -> ModelParams:
        return ModelParams(
            g=self.g,
            delta=self.delta,
            kappa=self.kappa,
            nbar1=self.nbar1,
            nbar2=self.nbar2,
        )

    @property
    def resolved_cutoff(self) -> tuple[int, int]:
        if self.cutoff is not None:
            return self.cutoff
        return default_cutoff(self.nbar1, self.nbar2)

    @property
    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.tmax, self.samples)


@dataclass
class TimeSeries:
    """Uniform-grid observable traces plus bookkeeping columns."""

    t: np.ndarray
    columns: dict[str, np.ndarray]
    diagnostics: dict[str, np.ndarray] = field(default_factory=dict)


def simulate(cfg: RunConfig) -> TimeSeries:
    """Dressed-picture run; dipole-squeezing samples at inversion nodes are NaN."""
    p = cfg.params
    cutoff = cfg.resolved_cutoff
    t_grid = cfg.time_grid
    w0 = coherent_excited(p, cutoff, mode=cfg.init_mode)

    names = cfg.observables
    want_f = [n for n in names if n in ("F1", "F2")]
    plain = [n for n in names if n not in ("F1", "F2")]
    cols = {n: np.empty(len(t_grid)) for n in names}
    diag = {k: np.empty(len(t_grid)) for k in ("trace", "dark_weight", "atom_norm")}

    for j, w in enumerate(
        secular_solver.iter_evolve(w0, p, t_grid, manifold=cfg.manifold)
    ):
        t = t_grid[j]
        vals = observables.evaluate(w, t, p, plain)
        for n in plain:
            cols[n][j] = vals[n]
        if want_f:
            try:
                f1, f2, _ = observables.atomic_dipole_squeezing(w, t, p)
            except InversionNodeError:
                f1 = f2 = math.nan
            for n in want_f:
                cols[n][j] = f1 if n == "F1" else f2
        re, rg = observables.atomic_populations(w, t, p)
        diag["trace"][j] = w.trace()
        diag["dark_weight"][j] = w.dark_total()
        diag["atom_norm"][j] = re + rg
    return TimeSeries(t=t_grid, columns=cols, diagnostics=diag)


def _oracle_ids(names) -> list[str]:
    ids: list[str] = ["trace"]
    for n in names:
        if n in ("Re", "Rg", "sigma3"):
            ids += ["Re", "Rg"]
        elif n == "N1":
            ids.append("N1")
        elif n == "N2":
            ids.append("N2")
        elif n == "G2_1":
            ids += ["N1", "n1fact2"]
        elif n == "G2_2":
            ids += ["N2", "n2fact2"]
        elif n in ("S1", "S2"):
            ids += ["N1", "a1", "a1sq"]
        elif n in ("F1", "F2"):
            ids += ["Re", "Rg", "splus"]
    seen: list[str] = []
    for i in ids:
        if i not in seen:
            seen.append(i)
    return seen


def oracle_series(cfg: RunConfig, dt: float | None = None) -> TimeSeries:
    """Same observables from the direct integrator (no secular approximation)."""
    if cfg.init_mode != "full-coherence" or cfg.manifold != "full":
        raise ValidationError(
            "the brute-force comparison is defined for the full-coherence "
            "initial state on the full manifold"
        )
    p = cfg.params
    cutoff = cfg.resolved_cutoff
    t_grid = cfg.time_grid
    rho0 = lindblad_oracle.coherent_excited_bare(p, cutoff)
    ids = _oracle_ids(cfg.observables)
    raw = lindblad_oracle.integrate_observed(rho0, p, t_grid, ids, dt=dt)

    cols: dict[str, np.ndarray] = {}
    for n in cfg.observables:
        if n in ("Re", "Rg"):
            cols[n] = raw[n].real if np.iscomplexobj(raw[n]) else raw[n]
        elif n == "sigma3":
            cols[n] = raw["Re"] - raw["Rg"]
        elif n in ("N1", "N2"):
            cols[n] = raw[n]
        elif n in ("G2_1", "G2_2"):
            mode = n[3]
            nbar = raw[f"N{mode}"]
            fact2 = raw[f"n{mode}fact2"]
            cols[n] = np.where(
                nbar > observables.DEGENERATE_TOL,
                (fact2 - nbar**2) / np.maximum(nbar, observables.DEGENERATE_TOL) ** 2,
                math.nan,
            )
        elif n in ("S1", "S2"):
            amp, amp2, nbar = raw["a1"], raw["a1sq"], raw["N1"]
            if n == "S1":
                cols[n] = 2.0 * amp2.real + 2.0 * nbar - (2.0 * amp.real) ** 2 + 1.0
            else:
                cols[n] = -2.0 * amp2.real + 2.0 * nbar - (2.0 * amp.imag) ** 2 + 1.0
        elif n in ("F1", "F2"):
            s3 = raw["Re"] - raw["Rg"]
            d = raw["splus"] * np.exp(-1j * p.delta * t_grid)
            quad = d.real if n == "F1" else d.imag
            cols[n] = np.where(
                np.abs(s3) > NODE_TOL,
                (1.0 - 4.0 * quad**2) / np.maximum(np.abs(s3), NODE_TOL),
                math.nan,
            )
    return TimeSeries(
        t=t_grid, columns=cols, diagnostics={"trace": raw["trace"].real}
    )


@dataclass
class OracleReport:
    """Per-observable worst-case deviation between solver and oracle."""

    max_dev: dict[str, float]
    tolerance: dict[str, float]
    compared: dict[str, int]
    passed: bool

    def format(self) -> str:
        lines = ["observable  max|dev|   tol      samples  status"]
        for n, dev in self.max_dev.items():
            tol = self.tolerance[n]
            ok = "ok" if dev <= tol else "EXCEEDED"
            lines.append(
                f"{n:<11} {dev:<10.4g} {tol:<8.3g} {self.compared[n]:<8d} {ok}"
            )
        lines.append("overall: " + ("ok" if self.passed else "EXCEEDED"))
        return "\n".join(lines)


def oracle_check(cfg: RunConfig, dt: float | None = None) -> OracleReport:
    """Compare the dressed solver against the direct integrator.

    Dipole-squeezing columns are compared only where the oracle inversion
    stays clear of zero (|sigma3| >= NODE_EXCLUSION); both solvers blow up
    there by construction, at slightly shifted node times.
    """
    if cfg.init_mode != "full-coherence" or cfg.manifold != "full":
        raise ValidationError(
            "the brute-force comparison is defined for the full-coherence "
            "initial state on the full manifold"
        )
    # refuse oversized requests before spending time on the secular run
    lindblad_oracle.coherent_excited_bare(cfg.params, cfg.resolved_cutoff)
    names = cfg.observables
    aug = cfg
    if any(n in ("F1", "F2") for n in names) and "sigma3" not in names:
        aug = dataclasses.replace(cfg, observables=tuple(names) + ("sigma3",))
    secular = simulate(aug)
    oracle = oracle_series(aug, dt=dt)
    s3_oracle = oracle.columns.get("sigma3")

    max_dev: dict[str, float] = {}
    compared: dict[str, int] = {}
    passed = True
    for n in cfg.observables:
        a, b = secular.columns[n], oracle.columns[n]
        mask = np.isfinite(a) & np.isfinite(b)
        if n in ("F1", "F2") and s3_oracle is not None:
            mask &= np.abs(s3_oracle) >= NODE_EXCLUSION
        dev = float(np.max(np.abs(a[mask] - b[mask]))) if mask.any() else math.nan
        max_dev[n] = dev
        compared[n] = int(mask.sum())
        if not (dev <= ORACLE_TOLERANCES[n]):
            passed = False
    return OracleReport(
        max_dev=max_dev,
        tolerance={n: ORACLE_TOLERANCES[n] for n in cfg.observables},
        compared=compared,
        passed=passed,
    )
