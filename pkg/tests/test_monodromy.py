"""Transfer-matrix product tests.

The frozen complex entries and log-norms were produced by a 50-digit
mpmath reimplementation of the plain ordered product (no chunking, no
rescaling) and are trusted to well below the asserted tolerances.
"""

import math

import numpy as np
import pytest

from nevbound.hamiltonian import alternating_decay_family, new_validated
from nevbound.monodromy import (
    choose_truncation,
    circle_lognorms,
    growth_profile,
    log_max_on_circle,
    mixed_frame_bound,
    monodromy_prefix,
    rotated_projection_norm,
    scaling_rotation,
    spectral_norm,
    tail_bound,
    transfer_matrix,
)

# mpmath oracle, alternating-decay family (3, 1), N = 1000, z = 3 + 2i
ORACLE_PREFIX = np.array([
    [-0.39379121594271859 - 1.1638223647220251j,
     -0.97581238939996813 + 0.22223627342408985j],
    [2.4672358541969797 + 1.9902624290885753j,
     1.5571572244126681 - 1.0625959941522260j],
])
ORACLE_PREFIX_LOGNORM = 1.3878886270445403

# same family, N = 2000, R = 100, angles k*pi/8
ORACLE_ANGLE_LOGNORMS = [
    7.0378104351997345, 8.2639159330352189, 8.8748103078006576,
    9.1643228056779198, 9.2586037060915137, 9.1986996942460848,
    9.0223051355008507, 8.8070354133465048,
]


def test_single_transfer_matrix_values():
    W = transfer_matrix(2.0, 0.0, 1.0 + 0.0j)
    assert np.allclose(W, [[1.0, -2.0], [0.0, 1.0]])
    # log of the larger singular value of [[1,-2],[0,1]] is log(1+sqrt 2)
    assert math.log(spectral_norm(W[None, ...])[0]) == pytest.approx(
        0.88137358701954302, abs=1e-15)
    W1 = transfer_matrix(1.0, 0.0, 1.0 + 0.0j)
    assert math.log(spectral_norm(W1[None, ...])[0]) == pytest.approx(
        0.48121182505960347, abs=1e-15)  # golden ratio


def test_transfer_matrix_determinant_and_angle():
    rng = np.random.default_rng(7)
    for _ in range(50):
        l = float(rng.uniform(0.01, 10.0))
        phi = float(rng.uniform(0.0, math.pi))
        z = complex(rng.normal(), rng.normal()) * 10.0
        W = transfer_matrix(l, phi, z)
        # direct float det cancels terms of size |z l|^2
        tol = 4e-16 * (1.0 + abs(z * l) ** 2)
        assert abs(W[0, 0] * W[1, 1] - W[0, 1] * W[1, 0] - 1.0) < tol


def test_prefix_matches_mpmath_oracle():
    H = alternating_decay_family(3.0, 1.0)
    M = monodromy_prefix(H, 1000, 3.0 + 2.0j)
    assert np.max(np.abs(M.to_matrix() - ORACLE_PREFIX)) < 1e-12
    assert M.log_norm() == pytest.approx(ORACLE_PREFIX_LOGNORM, abs=1e-12)
    assert abs(M.det_residual()) < 1e-12


def test_angle_sweep_matches_oracle():
    H = alternating_decay_family(3.0, 1.0)
    thetas = np.arange(8) * math.pi / 8.0
    vals = circle_lognorms(H, 100.0, 2000, thetas)
    assert np.max(np.abs(vals - ORACLE_ANGLE_LOGNORMS)) < 1e-12


def test_circle_max_converges():
    H = alternating_decay_family(3.0, 1.0)
    v = log_max_on_circle(H, 100.0, eps=1e-3)
    # the K = 2048 grid value; the angle sweep is smooth so the adaptive
    # doubling must land within its eps of this
    assert v == pytest.approx(9.259077807115426, abs=1e-3)


def test_det_residual_stays_tiny_for_long_products():
    # the 1e-9 certificate is only meaningful while kappa^2 * eps stays
    # below it, i.e. log-norms up to ~7; larger products get the
    # condition-scaled check
    H = alternating_decay_family(2.0, 0.0)
    for z in (10.0 + 0.0j, 8.0j, -6.0 + 8.0j, 20.0 + 0.0j, 16.0j):
        M = monodromy_prefix(H, 5000, z)
        assert abs(M.det_residual()) < 1e-9
    M = monodromy_prefix(H, 5000, 50.0 + 0.0j)
    assert abs(M.det_residual()) < 1e-13 * math.exp(2.0 * M.log_norm())


def test_huge_radius_uses_rescaling():
    # log-norm far beyond float overflow of the raw entries
    H = alternating_decay_family(1.5, 1.0)
    M = monodromy_prefix(H, 4000, 1e8 + 0.0j)
    assert M.log_norm() > 700.0  # e^700 overflows a float64
    assert np.isfinite(M.log_norm())
    # the determinant of so ill-conditioned a product is not certifiable
    # in float64, and the diagnostic must say so instead of guessing
    assert math.isnan(abs(M.det_residual()))


def test_norm_product_upper_bound():
    # ||W_1 ... W_N|| <= prod (1 + R l_j), every partial product too
    H = alternating_decay_family(3.0, 1.0)
    l = H.lengths(500)
    R = 50.0
    cap = float(np.sum(np.log1p(R * l)))
    M = monodromy_prefix(H, 500, R + 0.0j)
    assert M.log_norm() <= cap + 1e-9
    assert M.log_norm() >= 0.0 - 1e-12  # det = 1 forces norm >= 1


def test_tail_bound_and_truncation():
    H = alternating_decay_family(3.0, 1.0)
    c = H.comparison
    R = 100.0
    N = choose_truncation(c.c_l, c.c_phi, R, eps=1e-3)
    assert N == 317
    assert tail_bound(c.c_l, c.c_phi, N, R) <= 0.5e-3
    assert tail_bound(c.c_l, c.c_phi, N - 1, R) > 0.5e-3

    # truncated vs long product agree within eps
    full = log_max_on_circle(H, R, eps=1e-3)
    direct = float(np.max(circle_lognorms(H, R, 5000,
                                          np.linspace(0, math.pi, 257))))
    assert abs(full - direct) < 2e-3


def test_tail_bound_monotone_in_N():
    H = alternating_decay_family(3.0, 1.0)
    c = H.comparison
    vals = [tail_bound(c.c_l, c.c_phi, N, 50.0) for N in (10, 30, 100, 300)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert all(v >= 0 for v in vals)


def test_growth_profile_classification():
    H = alternating_decay_family(3.0, 1.0)
    radii = np.geomspace(1e2, 1e5, 7)
    prof = growth_profile(H, radii, eps=1e-2)
    # joint decay exponent 4 -> order 1/4
    assert prof.order_estimate == pytest.approx(0.25, abs=0.05)
    assert prof.classification == "stable power growth"


# ------------------------------------------------------ frame helpers

def test_scaling_rotation_norm():
    A = scaling_rotation(2.0, 0.3)
    assert spectral_norm(A[None, ...].astype(complex))[0] == pytest.approx(
        2.0, rel=1e-14)


def test_rotated_projection_norm_identity():
    # ||T (P(phi) J) T^-1|| for T = scaling_rotation(a, psi): the
    # conjugated nilpotent is rank one, and both factor lengths coincide,
    # giving exactly a^2 cos^2(phi-psi) + a^-2 sin^2(phi-psi)
    rng = np.random.default_rng(3)
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    for _ in range(200):
        a = float(rng.uniform(0.2, 5.0))
        psi = float(rng.uniform(0, math.pi))
        phi = float(rng.uniform(0, math.pi))
        T = scaling_rotation(a, psi)
        c, s = math.cos(phi), math.sin(phi)
        P = np.array([[c * c, c * s], [c * s, s * s]])
        direct = np.linalg.norm(T @ (P @ J) @ np.linalg.inv(T), 2)
        assert direct == pytest.approx(rotated_projection_norm(a, psi, phi),
                                       rel=1e-12)


def test_mixed_frame_bound_is_sharp_up_to_factor_two():
    # triangle-inequality bound on ||T_a T_b^-1||: upper, and never more
    # than twice the true norm (two terms, each at most the norm)
    rng = np.random.default_rng(5)
    for _ in range(200):
        a = float(rng.uniform(0.2, 5.0))
        b = float(rng.uniform(0.2, 5.0))
        psi = float(rng.uniform(0, math.pi))
        phi = float(rng.uniform(0, math.pi))
        Ta = scaling_rotation(a, psi)
        Tb = scaling_rotation(b, phi)
        direct = np.linalg.norm(Ta @ np.linalg.inv(Tb), 2)
        bound = mixed_frame_bound(a, psi, b, phi)
        assert direct <= bound * (1 + 1e-12)
        assert bound <= 2.0 * direct * (1 + 1e-12)
