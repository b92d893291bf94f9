"""Tests for the Hamiltonian data model, families and the Jacobi bridge.

Round-trip identities are exercised as properties (hypothesis); the
frozen bridge values below were computed by hand from the defining
formulas (offdiagonal 1/(sin(increment) sqrt(l_n l_{n+1})), diagonal
from the cotangent sums).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nevbound.hamiltonian import (
    HamburgerHamiltonian,
    JacobiParameters,
    alternating_decay_family,
    family_from_string,
    hamiltonian_from_jacobi,
    jacobi_from_hamiltonian,
    new_validated,
    prescribed_growth_family,
)

ZETA3 = 1.2020569031595943  # sum of 1/n^3


# ----------------------------------------------------------------- frozen

def test_bridge_cubic_lengths_quarter_turns():
    # l_j = j^-3, angle increments pi/2: offdiagonal (n(n+1))^(3/2), zero diagonal
    N = 6
    l = np.arange(1.0, N + 1) ** -3.0
    phi = (np.arange(N) * math.pi / 2.0) % math.pi
    jp = jacobi_from_hamiltonian(new_validated(l, phi), N)
    expect_b = [2.8284271247461901, 14.696938456699068, 41.569219381653056,
                89.442719099991588, 164.31676725154983]
    assert np.allclose(jp.b, expect_b, rtol=1e-14, atol=0)
    assert np.max(np.abs(jp.a)) < 1e-12


def test_bridge_unit_lengths_eighth_turns():
    N = 8
    l = np.ones(N)
    phi = (np.arange(N) * math.pi / 4.0) % math.pi
    jp = jacobi_from_hamiltonian(new_validated(l, phi), N)
    assert np.allclose(jp.b, math.sqrt(2.0), rtol=1e-15)
    assert jp.a[0] == pytest.approx(-1.0, abs=1e-14)
    assert np.allclose(jp.a[1:], -2.0, rtol=1e-14)


def test_inverse_bridge_first_step():
    n = np.arange(1.0, 6.0)
    jp = JacobiParameters(a=np.zeros(5), b=(n * (n + 1)) ** 1.5)
    H = hamiltonian_from_jacobi(jp)
    assert H._l[0] == 1.0 and H._phi[0] == 0.0
    assert H._l[1] == pytest.approx(0.125, rel=1e-15)
    assert H._phi[1] == pytest.approx(math.pi / 2.0, rel=1e-15)
    # and the full window reproduces j^-3
    assert np.allclose(H._l, np.arange(1.0, 7.0) ** -3.0, rtol=1e-13)


def test_alternating_decay_total_length_is_zeta3():
    H = alternating_decay_family(3.0, 1.0)
    assert H.total_length() == pytest.approx(ZETA3, abs=1e-9)
    assert H.limit_circle


def test_tail_handles_dominate_exact_tails():
    H = alternating_decay_family(3.0, 1.0)
    l = H.lengths(20000)
    for N in (10, 50, 400):
        exact = float(np.sum(l[N:]))
        bound = H.tail_upper(N)
        # integral comparison is loose by a factor 1 + O(1/N)
        assert exact <= bound <= (1.0 + 2.0 / N) * exact + 1e-12
    # weighted angle tail at the reference direction
    phi = H.angles(20000)
    w = l * np.sin(phi - H.psi_ref) ** 2
    for N in (10, 50, 400):
        exact = float(np.sum(w[N:]))
        assert exact <= H.tail_phi_upper(N, H.psi_ref) \
            <= (1.0 + 2.5 / N) * exact + 1e-12


# ------------------------------------------------------------- validation

def test_new_validated_rejects_bad_data():
    with pytest.raises(ValueError):
        new_validated([1.0, -0.5], [0.0, 0.3])
    with pytest.raises(ValueError):
        new_validated([1.0, float("nan")], [0.0, 0.3])
    with pytest.raises(ValueError):
        new_validated([1.0], [0.0, 0.3])


def test_family_parameter_validation():
    with pytest.raises(ValueError):
        alternating_decay_family(1.0, 1.0)      # length sum diverges
    with pytest.raises(ValueError):
        alternating_decay_family(3.0, -0.5)
    with pytest.raises(ValueError):
        prescribed_growth_family("rotation", 3.0, omega=2.0)


def test_bridge_rejects_collinear_angles():
    l = np.array([1.0, 1.0, 1.0])
    phi = np.array([0.3, 0.3 + math.pi, 1.0]) % math.pi
    with pytest.raises(ValueError, match="coincide"):
        jacobi_from_hamiltonian(new_validated(l, phi), 3)


def test_jacobi_parameter_validation():
    with pytest.raises(ValueError):
        JacobiParameters(a=np.zeros(3), b=np.array([1.0, -1.0, 1.0]))
    with pytest.raises(ValueError):
        JacobiParameters(a=np.zeros(3), b=np.ones(2))


# ------------------------------------------------------------- round trips

@st.composite
def jacobi_arrays(draw):
    n = draw(st.integers(min_value=2, max_value=10))
    a = draw(st.lists(st.floats(-5.0, 5.0), min_size=n, max_size=n))
    b = draw(st.lists(st.floats(0.2, 5.0), min_size=n, max_size=n))
    return np.asarray(a), np.asarray(b)


@settings(deadline=None, max_examples=120)
@given(jacobi_arrays())
def test_roundtrip_jacobi_to_hamiltonian_and_back(ab):
    # tolerance note: angle increments can come out nearly degenerate for
    # random (a, b), and the cotangent sums then amplify the float64
    # angle representation error to ~1e-8; structural bugs would show as
    # O(1) misses, so the relaxed tolerance keeps the property honest
    a, b = ab
    H = hamiltonian_from_jacobi(JacobiParameters(a=a, b=b))
    back = jacobi_from_hamiltonian(H, len(a) + 1)
    assert np.allclose(back.b, b, rtol=1e-6, atol=1e-7)
    assert np.allclose(back.a, a, rtol=1e-6, atol=1e-7)


@st.composite
def normalized_hamiltonians(draw):
    n = draw(st.integers(min_value=3, max_value=10))
    ls = [1.0] + draw(st.lists(st.floats(0.2, 5.0), min_size=n - 1,
                               max_size=n - 1))
    inc = draw(st.lists(st.floats(0.15, math.pi - 0.15), min_size=n - 1,
                        max_size=n - 1))
    phi = np.concatenate([[0.0], np.cumsum(inc)]) % math.pi
    return np.asarray(ls), phi


@settings(deadline=None, max_examples=120)
@given(normalized_hamiltonians())
def test_roundtrip_hamiltonian_to_jacobi_and_back(lphi):
    l, phi = lphi
    jp = jacobi_from_hamiltonian(new_validated(l, phi), len(l))
    H2 = hamiltonian_from_jacobi(jp)
    assert np.allclose(H2._l, l, rtol=1e-9, atol=1e-12)
    # angles agree mod pi
    d = np.abs(H2._phi - phi)
    assert np.all(np.minimum(d, math.pi - d) < 1e-9)


@settings(deadline=None, max_examples=60)
@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_bridge_invariant_under_pi_shifts(shifts):
    l = np.array([1.0, 0.5, 2.0, 0.25])
    phi = np.array([0.0, 0.7, 2.1, 1.3])
    jp0 = jacobi_from_hamiltonian(new_validated(l, phi % math.pi), 4)
    shifted = phi + math.pi * np.asarray(shifts, dtype=float)
    # the bridge reads angles through increments mod pi, so integer
    # pi-shifts must not change anything
    jp1 = jacobi_from_hamiltonian(
        HamburgerHamiltonian(name="shifted", _l=l, _phi=shifted), 4)
    assert np.allclose(jp0.b, jp1.b, rtol=1e-12)
    assert np.allclose(jp0.a, jp1.a, rtol=1e-12, atol=1e-12)


# -------------------------------------------------------------- majorants

@pytest.mark.parametrize("alpha,beta", [(3.0, 1.0), (2.0, 0.0), (1.5, 0.8),
                                        (4.0, 2.0)])
def test_alternating_decay_majorants_hold(alpha, beta):
    H = alternating_decay_family(alpha, beta)
    c = H.comparison
    j = np.arange(1, 301)
    l = H.lengths(301)
    phi = H.angles(301)
    sind = np.abs(np.sin(np.diff(np.concatenate([phi, [0.0]]))[:300]))
    sind = np.abs(np.sin(phi[1:301] - phi[:300]))
    assert np.all(l[:300] <= c.d_l(j) * (1 + 1e-12))
    assert np.all(sind <= c.d_phi(j) * (1 + 1e-12))
    # pointwise minorants for the lower bound
    low_l, low_p = H.lower_pair
    assert np.all(l[:300] >= low_l(j) * (1 - 1e-12))
    assert np.all(sind >= low_p(j) * (1 - 1e-12))


def test_prescribed_growth_variants():
    Hm = prescribed_growth_family("minus2", 3.0)
    phi = Hm.angles(200)
    inc = np.diff(phi)
    n = np.arange(1, 200)
    # harmonic increments 1/n (mod pi wrapping aside)
    assert np.allclose(np.mod(inc, math.pi), 1.0 / n, rtol=1e-10)

    Hr = prescribed_growth_family("rotation", 3.0, omega=0.5)
    psi = math.acos(-0.25)
    assert np.allclose(np.diff(Hr.angles(50)) % math.pi, psi % math.pi,
                       rtol=1e-12)
    assert np.allclose(Hr.lengths(50),
                       1.0 / (math.sin(psi) * np.arange(1.0, 51.0) ** 3.0),
                       rtol=1e-12)

    Hs = prescribed_growth_family("sequence", 3.0, gamma=1.0, omega_rho=1.0)
    inc = np.diff(Hs.angles(100)) % math.pi
    k = np.arange(1, 100)
    assert np.allclose(inc, math.pi / 2.0 + k ** -1.0 / 4.0, rtol=1e-10)


def test_family_grammar():
    H = family_from_string("example_b6(3, 1)")
    assert H.comparison is not None
    assert H.lengths(4)[3] == pytest.approx(4.0 ** -3.0)
    H2 = family_from_string("b83(rotation, omega=0.5, sigma=3)")
    assert H2.lengths(10)[0] > 0
    with pytest.raises(ValueError):
        family_from_string("no_such_family(1)")
    with pytest.raises(ValueError):
        family_from_string("example_b6")
