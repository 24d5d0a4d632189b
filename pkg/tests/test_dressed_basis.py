"""Dressed-state amplitudes, energies and branch identities.

Expected numbers are frozen from hand evaluation of the 2x2 block
eigensystem; the structural checks diagonalize the same block with
numpy.linalg.eigh as an independent route.
"""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ntpjc import (
    BRANCH_MINUS,
    BRANCH_PLUS,
    DarkIndex,
    DressedIndex,
    ModelParams,
    ValidationError,
    dressed_amplitudes,
    eigen_energy,
    gamma,
    rabi_frequency,
)
from ntpjc.dressed_basis import gamma_table, rabi_table

BRANCHES = (BRANCH_PLUS, BRANCH_MINUS)

blocks = st.tuples(st.integers(0, 40), st.integers(0, 40))
detunings = st.floats(-50.0, 50.0)
couplings = st.floats(0.05, 10.0)


def block_matrix(n1: int, n2: int, p: ModelParams) -> np.ndarray:
    # interaction block in the frame where the bare pair is degenerate
    beta = math.sqrt((n1 + 1) * (n2 + 1))
    return np.array([[0.5 * p.delta, p.g * beta], [p.g * beta, -0.5 * p.delta]])


def test_rabi_frequency_frozen_values():
    p = ModelParams()
    assert rabi_frequency(0, 0, p) == pytest.approx(1.0, abs=0)
    assert rabi_frequency(1, 2, p) == pytest.approx(2.449489742783178, abs=1e-15)
    p2 = ModelParams(delta=2.0)
    assert rabi_frequency(0, 0, p2) == pytest.approx(1.4142135623730951, abs=1e-15)
    p3 = ModelParams(delta=3.0)
    assert rabi_frequency(1, 2, p3) == pytest.approx(2.8722813232690143, abs=1e-15)


def test_gamma_frozen_values():
    # delta = 2, block (0,0): Omega = sqrt(2), gamma^2 = 1 +/- 1/sqrt(2)
    p = ModelParams(delta=2.0)
    assert gamma(0, 0, BRANCH_PLUS, p) == pytest.approx(1.3065629648763766, abs=1e-15)
    assert gamma(0, 0, BRANCH_MINUS, p) == pytest.approx(0.541196100146197, abs=1e-15)
    # resonance: both branches weigh the bare pair equally
    p0 = ModelParams()
    assert gamma(3, 7, BRANCH_PLUS, p0) == pytest.approx(1.0, abs=0)
    assert gamma(3, 7, BRANCH_MINUS, p0) == pytest.approx(1.0, abs=0)


def test_eigen_energy_frozen_value():
    # omega1 = omega2 = 100, delta = 0: phi(0,0) = 100, split by Omega = 1
    p = ModelParams()
    assert eigen_energy(DressedIndex(0, 0, BRANCH_PLUS), p) == pytest.approx(101.0, abs=1e-12)
    assert eigen_energy(DressedIndex(0, 0, BRANCH_MINUS), p) == pytest.approx(99.0, abs=1e-12)


@given(blocks, detunings, couplings)
def test_branch_identities(block, delta, g):
    n1, n2 = block
    p = ModelParams(g=g, delta=delta)
    gp = gamma(n1, n2, BRANCH_PLUS, p)
    gm = gamma(n1, n2, BRANCH_MINUS, p)
    omega = rabi_frequency(n1, n2, p)
    assert gp * gp + gm * gm == pytest.approx(2.0, abs=1e-12)
    beta = math.sqrt((n1 + 1) * (n2 + 1))
    assert gp * gm == pytest.approx(g * beta / omega, rel=1e-12)
    assert 0.0 <= gm <= gp <= math.sqrt(2.0) or delta < 0


@given(blocks, detunings, couplings)
def test_dressed_states_orthonormal(block, delta, g):
    n1, n2 = block
    p = ModelParams(g=g, delta=delta)
    up = dressed_amplitudes(DressedIndex(n1, n2, BRANCH_PLUS), p)
    lo = dressed_amplitudes(DressedIndex(n1, n2, BRANCH_MINUS), p)
    assert up[0] ** 2 + up[1] ** 2 == pytest.approx(1.0, abs=1e-12)
    assert lo[0] ** 2 + lo[1] ** 2 == pytest.approx(1.0, abs=1e-12)
    assert up[0] * lo[0] + up[1] * lo[1] == pytest.approx(0.0, abs=1e-12)


@given(blocks, detunings, couplings, st.sampled_from(BRANCHES))
def test_amplitudes_are_block_eigenvectors(block, delta, g, branch):
    # independent route: eigendecomposition of the interaction block
    n1, n2 = block
    p = ModelParams(g=g, delta=delta)
    h = block_matrix(n1, n2, p)
    vec = np.array(dressed_amplitudes(DressedIndex(n1, n2, branch), p))
    energy = branch * rabi_frequency(n1, n2, p)
    residual = h @ vec - energy * vec
    assert np.max(np.abs(residual)) < 1e-10 * max(1.0, abs(energy))


def test_eigen_energy_matches_eigh():
    p = ModelParams(g=0.7, delta=5.0, omega1=90.0, omega2=110.0)
    for n1, n2 in ((0, 0), (2, 5), (7, 1)):
        h = block_matrix(n1, n2, p)
        eigenvalues = np.linalg.eigh(h)[0]
        phi = p.omega1 * (n1 + 0.5) + p.omega2 * (n2 + 0.5)
        got = sorted(
            eigen_energy(DressedIndex(n1, n2, b), p) - phi for b in BRANCHES
        )
        assert np.allclose(got, eigenvalues, atol=1e-12)


def test_large_detuning_limits():
    p = ModelParams(delta=1e6, omega1=1e7, omega2=1e7)
    assert gamma(0, 0, BRANCH_PLUS, p) == pytest.approx(math.sqrt(2.0), rel=1e-6)
    assert gamma(0, 0, BRANCH_MINUS, p) == pytest.approx(0.0, abs=2e-3)
    # upper branch converges to the bare excited state
    amp_e, amp_g = dressed_amplitudes(DressedIndex(0, 0, BRANCH_PLUS), p)
    assert amp_e == pytest.approx(1.0, rel=1e-6)


def test_tables_match_scalar_routes():
    p = ModelParams(g=1.3, delta=4.0)
    cutoff = (6, 4)
    omega = rabi_table(p, cutoff)
    gp = gamma_table(p, cutoff, BRANCH_PLUS)
    assert omega.shape == (7, 5)
    for n1 in range(7):
        for n2 in range(5):
            assert omega[n1, n2] == pytest.approx(rabi_frequency(n1, n2, p), rel=1e-14)
            assert gp[n1, n2] == pytest.approx(gamma(n1, n2, BRANCH_PLUS, p), rel=1e-14)


def test_observable_frequencies_ignore_mode_frequencies():
    a = ModelParams(delta=3.0, omega1=100.0, omega2=100.0)
    b = ModelParams(delta=3.0, omega1=250.0, omega2=40.0)
    assert rabi_frequency(4, 2, a) == rabi_frequency(4, 2, b)
    assert gamma(4, 2, BRANCH_PLUS, a) == gamma(4, 2, BRANCH_PLUS, b)


def test_parameter_validation():
    with pytest.raises(ValidationError):
        ModelParams(g=0.0)
    with pytest.raises(ValidationError):
        ModelParams(g=-1.0)
    with pytest.raises(ValidationError):
        ModelParams(kappa=-0.1)
    with pytest.raises(ValidationError):
        ModelParams(nbar1=-2.0)
    with pytest.raises(ValidationError):
        ModelParams(delta=float("nan"))
    with pytest.raises(ValidationError):
        DressedIndex(-1, 0, BRANCH_PLUS)
    with pytest.raises(ValidationError):
        DressedIndex(0, 0, 2)
    with pytest.raises(ValidationError):
        DarkIndex("mode1", 0)
    with pytest.raises(ValidationError):
        DarkIndex("origin", 1)
    with pytest.raises(ValidationError):
        DarkIndex("sideways", 1)


def test_dark_index_photons():
    assert DarkIndex("mode1", 3).photons == (3, 0)
    assert DarkIndex("mode2", 2).photons == (0, 2)
    assert DarkIndex("origin", 0).photons == (0, 0)


def test_omega0_is_sum_plus_detuning():
    p = ModelParams(delta=7.0, omega1=80.0, omega2=120.0)
    assert p.omega0 == pytest.approx(207.0, abs=0)
