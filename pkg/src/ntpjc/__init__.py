"""Two-mode two-photon atom-cavity dynamics with cavity damping.

Dressed-basis secular solver for the damped two-photon two-mode
Jaynes-Cummings model, a brute-force density-matrix integrator used as a
cross-check, and observables (populations, photon statistics, field and
dipole squeezing) evaluated in closed form from the dressed data.
"""

from .dressed_basis import (
    BRANCH_MINUS,
    BRANCH_PLUS,
    DarkIndex,
    DressedIndex,
    ModelParams,
    dressed_amplitudes,
    eigen_energy,
    gamma,
    rabi_frequency,
)
from .errors import (
    CostGuardError,
    CutoffTooSmallError,
    DegenerateMeanPhotonError,
    InversionNodeError,
    NumericalError,
    OracleSizeError,
    StepSizeError,
    TraceDriftError,
    ValidationError,
)
from .initial_state import DressedDensity, coherent_excited, default_cutoff, fock_excited
from .observables import (
    OBSERVABLE_NAMES,
    atomic_dipole_squeezing,
    atomic_populations,
    evaluate,
    field_squeezing,
    mean_photon,
    second_order_correlation,
)
from .secular_solver import (
    RateGenerator,
    build_generator,
    coherence_decay_rate,
    evolve,
    evolve_populations,
    iter_evolve,
    offdiag_value,
)
from .simulate import (
    OracleReport,
    RunConfig,
    TimeSeries,
    oracle_check,
    oracle_series,
    simulate,
)

__all__ = [
    "BRANCH_MINUS",
    "BRANCH_PLUS",
    "CostGuardError",
    "CutoffTooSmallError",
    "DarkIndex",
    "DegenerateMeanPhotonError",
    "DressedDensity",
    "DressedIndex",
    "InversionNodeError",
    "ModelParams",
    "NumericalError",
    "OBSERVABLE_NAMES",
    "OracleReport",
    "OracleSizeError",
    "RateGenerator",
    "RunConfig",
    "StepSizeError",
    "TimeSeries",
    "TraceDriftError",
    "ValidationError",
    "atomic_dipole_squeezing",
    "atomic_populations",
    "build_generator",
    "coherence_decay_rate",
    "coherent_excited",
    "default_cutoff",
    "dressed_amplitudes",
    "eigen_energy",
    "evaluate",
    "evolve",
    "evolve_populations",
    "field_squeezing",
    "fock_excited",
    "gamma",
    "iter_evolve",
    "mean_photon",
    "oracle_check",
    "oracle_series",
    "offdiag_value",
    "rabi_frequency",
    "second_order_correlation",
    "simulate",
]

__version__ = "0.1.0"
