"""Closed-form observables on the dressed data.

Initial values of every quantity have exact references for coherent and
Fock inputs; the Rabi formula provides the exact lossless check, and the
mode-2 quantities must mirror mode 1 under swapping the field labels.
"""
import math

import numpy as np
import pytest

from ntpjc import (
    BRANCH_MINUS,
    BRANCH_PLUS,
    DegenerateMeanPhotonError,
    DressedIndex,
    InversionNodeError,
    ModelParams,
    ValidationError,
    atomic_dipole_squeezing,
    atomic_populations,
    coherent_excited,
    evolve,
    fock_excited,
    field_squeezing,
    mean_photon,
    second_order_correlation,
)
from ntpjc.observables import (
    OBSERVABLE_NAMES,
    evaluate,
    inversion,
    second_factorial_moment,
    slow_amplitude,
    slow_dipole,
)


def coherent_state(nbar1=1.5, nbar2=0.8, delta=1.3, kappa=0.0, cutoff=(14, 14)):
    p = ModelParams(nbar1=nbar1, nbar2=nbar2, delta=delta, kappa=kappa)
    return coherent_excited(p, cutoff=cutoff), p


def test_initial_values_coherent():
    w, p = coherent_state()
    re, rg = atomic_populations(w, 0.0, p)
    assert re == pytest.approx(1.0, abs=1e-10)
    assert rg == pytest.approx(0.0, abs=1e-10)
    assert mean_photon(w, 0.0, p, 1) == pytest.approx(p.nbar1, abs=1e-8)
    assert mean_photon(w, 0.0, p, 2) == pytest.approx(p.nbar2, abs=1e-8)
    for mode in (1, 2):
        assert second_order_correlation(w, 0.0, p, mode) == pytest.approx(0.0, abs=1e-6)
        assert field_squeezing(w, 0.0, p, 1, mode) == pytest.approx(1.0, abs=1e-6)
        assert field_squeezing(w, 0.0, p, 2, mode) == pytest.approx(1.0, abs=1e-6)
    f1, f2, s3 = atomic_dipole_squeezing(w, 0.0, p)
    assert f1 == pytest.approx(1.0, abs=1e-8)
    assert f2 == pytest.approx(1.0, abs=1e-8)
    assert s3 == pytest.approx(1.0, abs=1e-10)
    # the excited atom carries no dipole at t = 0
    assert slow_dipole(w, 0.0, p) == pytest.approx(0.0, abs=1e-10)
    # coherent amplitude of each mode starts at sqrt(nbar), real
    amp = slow_amplitude(w, 0.0, p, 1)
    assert amp == pytest.approx(math.sqrt(p.nbar1), abs=1e-8)


def test_lossless_rabi_inversion():
    for n1, n2, delta in ((0, 0, 0.0), (1, 2, 0.0), (2, 1, 2.0)):
        p = ModelParams(delta=delta)
        w = fock_excited(p, n1, n2)
        beta_sq = (n1 + 1) * (n2 + 1)
        omega = math.sqrt(0.25 * delta**2 + beta_sq)
        for t in np.linspace(0.0, 20.0, 41):
            re, rg = atomic_populations(w, t, p)
            want = 1.0 - (beta_sq / omega**2) * math.sin(omega * t) ** 2
            assert re == pytest.approx(want, abs=1e-12)
            assert re + rg == pytest.approx(1.0, abs=1e-12)


def test_photon_exchange_bookkeeping():
    # each de-excitation adds one photon to each mode: N_i = nbar_i + R_g
    w, p = coherent_state(nbar1=1.0, nbar2=0.6, delta=0.7, cutoff=(13, 13))
    for t in (0.0, 0.4, 1.7, 6.0):
        re, rg = atomic_populations(w, t, p)
        assert mean_photon(w, t, p, 1) == pytest.approx(p.nbar1 + rg, abs=1e-7)
        assert mean_photon(w, t, p, 2) == pytest.approx(p.nbar2 + rg, abs=1e-7)


def test_mode_swap_symmetry():
    pa = ModelParams(nbar1=1.2, nbar2=0.5, delta=1.1)
    pb = ModelParams(nbar1=0.5, nbar2=1.2, delta=1.1)
    wa = coherent_excited(pa, cutoff=(13, 13))
    wb = coherent_excited(pb, cutoff=(13, 13))
    for t in (0.3, 2.0, 9.0):
        assert mean_photon(wa, t, pa, 1) == pytest.approx(
            mean_photon(wb, t, pb, 2), abs=1e-10
        )
        assert second_order_correlation(wa, t, pa, 1) == pytest.approx(
            second_order_correlation(wb, t, pb, 2), abs=1e-10
        )
        assert field_squeezing(wa, t, pa, 1, 1) == pytest.approx(
            field_squeezing(wb, t, pb, 1, 2), abs=1e-10
        )


def test_equal_inputs_give_identical_modes():
    w, p = coherent_state(nbar1=1.0, nbar2=1.0, delta=0.9, kappa=0.01, cutoff=(13, 13))
    for s, t in zip(evolve(w, p, np.array([0.0, 3.0, 11.0])), (0.0, 3.0, 11.0)):
        assert mean_photon(s, t, p, 1) == pytest.approx(
            mean_photon(s, t, p, 2), abs=1e-10
        )
        assert second_order_correlation(s, t, p, 1) == pytest.approx(
            second_order_correlation(s, t, p, 2), abs=1e-10
        )


def test_fock_correlation_values():
    p = ModelParams()
    w = fock_excited(p, 1, 1)
    # <n(n-1)> = 0 for a single photon: G2 = (0 - 1)/1 = -1
    assert second_order_correlation(w, 0.0, p, 1) == pytest.approx(-1.0, abs=1e-12)
    assert second_factorial_moment(w, 0.0, p, 1) == pytest.approx(0.0, abs=1e-12)
    empty = fock_excited(p, 0, 0)
    with pytest.raises(DegenerateMeanPhotonError):
        second_order_correlation(empty, 0.0, p, 1)


def test_inversion_node_raises():
    p = ModelParams()
    w = fock_excited(p, 0, 0)
    # resonant single block: sigma3 = cos(2t), node at t = pi/4
    assert inversion(w, math.pi / 4, p) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(InversionNodeError):
        atomic_dipole_squeezing(w, math.pi / 4, p)
    f1, f2, s3 = atomic_dipole_squeezing(w, math.pi / 8, p)
    assert s3 == pytest.approx(math.cos(math.pi / 4), abs=1e-12)


def test_block_diagonal_mode_warns_and_flattens():
    p = ModelParams(nbar1=1.0, nbar2=1.0, delta=0.5)
    bd = coherent_excited(p, cutoff=(12, 12), mode="block-diagonal")
    with pytest.warns(UserWarning, match="coherence"):
        s = field_squeezing(bd, 1.3, p, 1, 1)
    # without cross coherences the quadrature variance is the thermal-like floor
    assert s == pytest.approx(2.0 * mean_photon(bd, 1.3, p, 1) + 1.0, abs=1e-10)
    with pytest.warns(UserWarning, match="coherence"):
        atomic_dipole_squeezing(bd, 1.3, p)


def test_omega_invariance():
    base = dict(nbar1=1.1, nbar2=0.7, delta=1.9, kappa=0.02)
    pa = ModelParams(**base, omega1=100.0, omega2=100.0)
    pb = ModelParams(**base, omega1=317.0, omega2=41.0)
    wa = coherent_excited(pa, cutoff=(13, 13))
    wb = coherent_excited(pb, cutoff=(13, 13))
    names = tuple(OBSERVABLE_NAMES)
    for t in (0.6, 4.2):
        va = evaluate(wa, t, pa, names)
        vb = evaluate(wb, t, pb, names)
        for name in names:
            assert va[name] == pytest.approx(vb[name], abs=1e-9), name


def test_evaluate_dispatch():
    w, p = coherent_state(cutoff=(12, 12))
    out = evaluate(w, 1.0, p, ("Re", "N1", "G2_2", "F1"))
    assert set(out) == {"Re", "N1", "G2_2", "F1"}
    assert out["Re"] == pytest.approx(atomic_populations(w, 1.0, p)[0], abs=1e-12)
    with pytest.raises(ValidationError):
        evaluate(w, 1.0, p, ("Re", "momentum"))
    with pytest.raises(ValidationError):
        field_squeezing(w, 0.0, p, quadrature=3)
    with pytest.raises(ValidationError):
        mean_photon(w, 0.0, p, mode=3)
