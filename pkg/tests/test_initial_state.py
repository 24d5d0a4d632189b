"""Initial density data in the dressed representation.

The reconstruction test is the load-bearing one: mapping the stored dressed
elements back to the bare product basis must reproduce the coherent-state
outer product exactly (excited-atom sector) and zeros elsewhere.
"""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from ntpjc import (
    BRANCH_MINUS,
    BRANCH_PLUS,
    CutoffTooSmallError,
    DarkIndex,
    DressedIndex,
    ModelParams,
    ValidationError,
    coherent_excited,
    default_cutoff,
    dressed_amplitudes,
    fock_excited,
)
from ntpjc.initial_state import (
    CROSS_OFFSETS,
    coherent_amplitudes,
    poisson_weight,
)

BRANCHES = (BRANCH_PLUS, BRANCH_MINUS)


def test_poisson_weight_frozen_value():
    # exp(-5) 5^5 / 5!
    assert poisson_weight(5.0, 5) == pytest.approx(0.1754673697678507, rel=1e-12)
    assert poisson_weight(0.0, 0) == 1.0
    assert poisson_weight(0.0, 3) == 0.0


@given(st.floats(0.0, 60.0), st.integers(0, 120))
def test_poisson_weight_matches_reference(nbar, n):
    assert poisson_weight(nbar, n) == pytest.approx(
        float(stats.poisson.pmf(n, nbar)), rel=1e-10, abs=1e-300
    )


def test_coherent_amplitudes_square_to_poisson():
    amps = coherent_amplitudes(3.2, 40)
    assert amps.shape == (41,)
    assert np.all(amps >= 0)
    for n in (0, 1, 7, 25):
        assert amps[n] ** 2 == pytest.approx(poisson_weight(3.2, n), rel=1e-12)
    assert np.sum(amps**2) == pytest.approx(1.0, abs=1e-10)


def test_default_cutoff_frozen_values():
    assert default_cutoff(0.0, 0.0) == (18, 18)
    assert default_cutoff(1.0, 1.0) == (19, 19)
    assert default_cutoff(2.0, 2.0) == (24, 24)
    assert default_cutoff(2.0, 0.0) == (24, 18)


def test_tail_guard():
    p = ModelParams(nbar1=2.0, nbar2=2.0)
    with pytest.raises(CutoffTooSmallError):
        coherent_excited(p, cutoff=(10, 10))
    # the default cutoff always clears the guard
    w = coherent_excited(p)
    assert w.cutoff == (24, 24)


def test_trace_is_one():
    p = ModelParams(nbar1=1.5, nbar2=0.8, delta=1.7)
    w = coherent_excited(p, cutoff=(14, 14))
    # the truncated state is renormalized, so no Poisson-tail deficit
    assert w.trace() == pytest.approx(1.0, abs=1e-12)
    assert w.dark_total() == 0.0


def test_bare_reconstruction():
    """Stored dressed elements reproduce the bare coherent outer product."""
    p = ModelParams(nbar1=1.5, nbar2=0.8, delta=1.7)
    cutoff = (14, 14)
    w = coherent_excited(p, cutoff=cutoff)
    c1 = coherent_amplitudes(p.nbar1, cutoff[0])
    c2 = coherent_amplitudes(p.nbar2, cutoff[1])

    offsets = ((0, 0),) + CROSS_OFFSETS
    for d1, d2 in offsets:
        for n1, n2 in ((0, 0), (1, 2), (3, 1), (5, 5)):
            m1, m2 = n1 + d1, n2 + d2
            ee = gg = eg = 0.0 + 0.0j
            for a in BRANCHES:
                mi = DressedIndex(m1, m2, a)
                ue, ug = dressed_amplitudes(mi, p)
                for b in BRANCHES:
                    ni = DressedIndex(n1, n2, b)
                    le, lg = dressed_amplitudes(ni, p)
                    elem = w.coherence(mi, ni)
                    ee += ue * elem * le
                    gg += ug * elem * lg
                    eg += ue * elem * lg
            want = c1[m1] * c1[n1] * c2[m2] * c2[n2]
            assert ee == pytest.approx(want, abs=1e-10)
            assert gg == pytest.approx(0.0, abs=1e-10)
            assert eg == pytest.approx(0.0, abs=1e-10)


def test_block_diagonal_mode_drops_cross_terms():
    p = ModelParams(nbar1=1.0, nbar2=1.0, delta=2.0)
    full = coherent_excited(p, cutoff=(12, 12))
    bd = coherent_excited(p, cutoff=(12, 12), mode="block-diagonal")
    assert bd.init_mode == "block-diagonal"
    assert np.array_equal(bd.diag_plus, full.diag_plus)
    assert np.array_equal(bd.diag_minus, full.diag_minus)
    assert np.array_equal(bd.block_coh, full.block_coh)
    for d in CROSS_OFFSETS:
        for pair in bd.cross[d]:
            assert np.all(bd.cross[d][pair] == 0)
            assert np.any(full.cross[d][pair] != 0)
    with pytest.raises(ValidationError):
        coherent_excited(p, cutoff=(12, 12), mode="no-such-mode")


def test_fock_excited_structure():
    p = ModelParams(delta=2.0)
    w = fock_excited(p, 1, 2)
    assert w.cutoff == (3, 4)
    assert w.trace() == pytest.approx(1.0, abs=1e-14)
    gp = math.sqrt(1.0 + p.delta / (2.0 * math.sqrt(p.delta**2 / 4 + 6.0)))
    assert w.diag(DressedIndex(1, 2, BRANCH_PLUS)) == pytest.approx(
        0.5 * gp**2, rel=1e-12
    )
    # single occupied block, no photon-number coherence
    assert w.diag(DressedIndex(0, 0, BRANCH_PLUS)) == 0.0
    for d in CROSS_OFFSETS:
        for pair in w.cross[d]:
            assert np.all(w.cross[d][pair] == 0)
    with pytest.raises(CutoffTooSmallError):
        fock_excited(p, 4, 0, cutoff=(3, 3))
    with pytest.raises(ValidationError):
        fock_excited(p, -1, 0)


def test_coherence_accessor_orientations():
    p = ModelParams(nbar1=1.0, nbar2=1.0, delta=1.0)
    w = coherent_excited(p, cutoff=(12, 12))
    mi = DressedIndex(2, 1, BRANCH_PLUS)
    ni = DressedIndex(1, 1, BRANCH_MINUS)
    assert w.coherence(ni, mi) == pytest.approx(
        w.coherence(mi, ni).conjugate(), abs=1e-15
    )
    same = DressedIndex(1, 1, BRANCH_PLUS)
    assert w.coherence(same, same) == pytest.approx(w.diag(same), abs=1e-15)
    with pytest.raises(KeyError):
        w.coherence(DressedIndex(5, 1, BRANCH_PLUS), ni)


def test_dark_accessors_start_empty():
    p = ModelParams(nbar1=0.5, nbar2=0.5)
    w = coherent_excited(p, cutoff=(11, 11))
    assert w.dark(DarkIndex("mode1", 3)) == 0.0
    assert w.dark(DarkIndex("origin", 0)) == 0.0
    assert w.dark_total() == 0.0
