"""Threshold functions, integrated density, remainder, crossing time,
assembled bounds.

Most frozen numbers admit closed forms for the pure-power fixture
d_l = t^-2, d_phi = t^-1, c_l = c_phi = t^-1 at R = 2000:

  k(R): 2 t^3 = R         -> 10
  h(R): t = R             -> 2000
  integral of the log-density on [1, t] for t < k:
      (t - 1) log R - 3 (t log t - t + 1)
  remainder at t = 1:  1 + log R
  remainder at t = 20: 1 + log R + log 20  (telescoping quotient sum)

and they were cross-checked against adaptive quadrature before
freezing.
"""

import json
import math

import numpy as np
import pytest

from nevbound.bounds import (
    CapError,
    ComparisonData,
    HypothesisViolation,
    L_term,
    auto_psi,
    bound_reports_to_csv,
    bound_reports_to_json,
    check_majorization,
    g_integral,
    h_of_R,
    integrated_density_table,
    k_of_R,
    lower_bound,
    solve_T,
    upper_bound_report,
    verify_bound_sandwich,
)
from nevbound.hamiltonian import alternating_decay_family, new_validated
from nevbound.regvar import DomainError, power_log

R0 = 2000.0


def _pp(c, a):
    return power_log(c, a, 0.0, domain_start=1.0).as_comparison()


@pytest.fixture(scope="module")
def cubic_data():
    return ComparisonData(d_l=_pp(1, -2), d_phi=_pp(1, -1),
                          c_l=_pp(1, -1), c_phi=_pp(1, -1))


def test_thresholds_match_closed_forms(cubic_data):
    assert k_of_R(cubic_data, R0) == pytest.approx(10.0, rel=1e-9)
    assert h_of_R(cubic_data, R0) == pytest.approx(2000.0, rel=1e-9)
    with pytest.raises(DomainError):
        k_of_R(cubic_data, 1.5)      # below 2/(d_l d_phi)(1) = 2
    with pytest.raises(DomainError):
        h_of_R(cubic_data, 0.5)      # below d_phi(1)/d_l(1) = 1


def test_integrated_density_frozen_and_analytic(cubic_data):
    g2 = g_integral(cubic_data, 2.0, R0)
    g10 = g_integral(cubic_data, 10.0, R0)
    assert g2 == pytest.approx(6.44201937618241, abs=1e-12)
    assert g10 == pytest.approx(26.330569346057374, abs=1e-11)

    def analytic(t):
        return (t - 1.0) * math.log(R0) - 3.0 * (t * math.log(t) - t + 1.0)

    for t in (1.5, 3.0, 7.0, 9.99):
        assert g_integral(cubic_data, t, R0) == pytest.approx(
            analytic(t), rel=1e-11)
    assert g_integral(cubic_data, 1.0, R0) == 0.0
    with pytest.raises(DomainError):
        g_integral(cubic_data, 0.5, R0)


def test_density_table_matches_quadrature(cubic_data):
    tab = integrated_density_table(cubic_data, R0)
    for t in (1.3, 2.0, 9.9, 10.0, 10.4, 55.0, 1999.0, 2000.0, 2341.0, 1e5):
        direct = g_integral(cubic_data, t, R0)
        assert tab.value(t) == pytest.approx(direct, rel=2e-10, abs=1e-10)
    # thresholds are stored exactly
    assert tab.kR == pytest.approx(10.0, rel=1e-9)
    assert tab.hR == pytest.approx(2000.0, rel=1e-9)


def test_crossing_time_solves_equation(cubic_data):
    T = solve_T(cubic_data, R0)
    assert T == pytest.approx(47.96189645051558, rel=1e-9)
    lhs = g_integral(cubic_data, T, R0)
    rhs = R0 * math.sqrt(float(cubic_data.c_l(T)) * float(cubic_data.c_phi(T)))
    assert lhs == pytest.approx(rhs, rel=1e-8)
    # bracketing: integrated density below the tail curve before T,
    # above after
    below = g_integral(cubic_data, 0.5 * T, R0)
    above = g_integral(cubic_data, 2.0 * T, R0)
    assert below < R0 * 2.0 / T
    assert above > R0 / (2.0 * T)


def test_remainder_term_closed_forms(cubic_data):
    assert L_term(cubic_data, 1.0, R0) == pytest.approx(
        1.0 + math.log(R0), rel=1e-12)
    # q(t) = d_phi/d_l = t is monotone: the quotient sum telescopes to
    # log m with m = 20
    assert L_term(cubic_data, 20.0, R0) == pytest.approx(
        1.0 + math.log(R0) + math.log(20.0), rel=1e-12)
    # m caps at floor(h(R)) ~ 2000: the numeric inverse may land a hair
    # below the exact threshold, so allow the one-index slack log(2000/1999)
    L_big = L_term(cubic_data, 5000.0, R0)
    assert L_big == pytest.approx(1.0 + math.log(R0) + math.log(2000.0),
                                  abs=1e-3)


def test_remainder_with_nonmonotone_quotient():
    # d_l with a log tilt makes q = d_phi/d_l non-monotone in general;
    # power-log telescoping must agree with the direct summed path
    data = ComparisonData(
        d_l=power_log(1.0, -2.0, 1.0).as_comparison(),
        d_phi=power_log(1.0, -1.0, -1.0).as_comparison(),
        c_l=_pp(1, -1), c_phi=_pp(1, -1))
    for t in (7.0, 300.0):
        L = L_term(data, t, 500.0)
        assert L >= 1.0
    # direct check at small m
    m = 7
    q = lambda j: float(data.d_phi(j)) / float(data.d_l(j))
    s = sum(abs(math.log(q(j) / q(j + 1))) for j in range(1, m))
    expected = (1.0 + math.log(500.0)
                + max(math.log(float(data.d_l(m)) / float(data.d_phi(m))), 0)
                + s)
    assert L_term(data, float(m), 500.0) == pytest.approx(expected, rel=1e-9)


def test_upper_bound_report_structure(cubic_data):
    rep = upper_bound_report(cubic_data, R0)
    assert rep.B_upper == pytest.approx(487.5468517108058, rel=1e-9)
    assert rep.core_B == pytest.approx(41.699768941861784, rel=1e-9)
    # the infimum of max(g, RC) sits at the crossing for this fixture
    assert rep.core_B == pytest.approx(rep.g_at_T, rel=1e-6)
    assert rep.B_upper == pytest.approx(
        9.0 * (max(rep.g_at_T, rep.RC_at_T) + rep.L_at_T), rel=1e-9)
    assert not rep.trivial and rep.flags == []
    assert rep.kR == pytest.approx(10.0, rel=1e-9)


def test_trivial_bound_flagged():
    # at tiny R the assembled bound exceeds R/2 and must say so
    data = ComparisonData(d_l=_pp(1, -2), d_phi=_pp(1, -1),
                          c_l=_pp(1, -1), c_phi=_pp(1, -1))
    rep = upper_bound_report(data, 3.0)
    assert rep.trivial
    assert any("trivial" in f for f in rep.flags)


def test_lower_bound_closed_form(cubic_data):
    val = lower_bound(cubic_data.d_l, cubic_data.d_phi, 1e4)
    assert val == pytest.approx(10.0 ** (4.0 / 3.0), rel=1e-9)
    growing = power_log(1.0, 0.5, 0.0, domain_start=1.0).as_comparison()
    with pytest.raises(ValueError):
        lower_bound(growing, growing, 100.0)


def test_majorization_constants_for_decay_family():
    H = alternating_decay_family(3.0, 1.0)
    mr = check_majorization(H, H.comparison, 4096)
    assert mr.exact_form
    for key in ("d_l", "c_l", "c_phi"):
        assert mr.constants[key] <= 1.0 + 1e-9
    assert 0.9 < mr.constants["d_phi"] <= 1.0 + 1e-9


def test_majorization_violation_detected():
    H = alternating_decay_family(3.0, 1.0)
    n = 2000
    l = np.array(H.lengths(n))
    phi = np.array(H.angles(n))
    l[1000:] = 0.05  # tail no longer summable like t^-3
    bad = new_validated(l, phi % math.pi)
    with pytest.raises(HypothesisViolation):
        check_majorization(bad, H.comparison, n)


def test_rescaled_data_scales_pointwise(cubic_data):
    r = cubic_data.rescaled(2.0, 3.0, 4.0, 5.0)
    t = 7.0
    assert float(r.d_l(t)) == pytest.approx(2.0 * float(cubic_data.d_l(t)))
    assert float(r.c_l(t)) == pytest.approx(4.0 * float(cubic_data.c_l(t)))
    # d_phi tops out at 1 (it majorizes a sine)
    assert float(r.d_phi(1.0)) <= 1.0


def test_auto_psi_finds_cluster_direction():
    H = alternating_decay_family(3.0, 1.0)
    psi = auto_psi(H, 2048)
    d = min(psi % math.pi, math.pi - psi % math.pi)
    assert d < 0.1


def test_sandwich_and_writers(tmp_path):
    H = alternating_decay_family(3.0, 1.0)
    reports = verify_bound_sandwich(H, H.comparison, [100.0, 1000.0],
                                    eps=1e-3, lower_data=H.lower_pair)
    assert len(reports) == 2
    for rep in reports:
        assert rep.logM is not None and rep.logM > 0
        assert rep.margin_upper is not None and rep.margin_upper >= 0.0
        assert rep.margin_lower_ratio is not None
        assert 1.0 <= rep.margin_lower_ratio <= 20.0

    csv_path = tmp_path / "r.csv"
    json_path = tmp_path / "r.json"
    bound_reports_to_csv(reports, csv_path)
    bound_reports_to_json(reports, json_path)
    head = csv_path.read_text().splitlines()[0]
    assert head == "R,kR,hR,TR,gT,RCinvT,LT,B_upper,lower_Dinv,logM,margin_upper"
    docs = json.loads(json_path.read_text())
    assert len(docs) == 2 and docs[0]["R"] == 100.0


def test_infinite_h_serializes_as_inf(tmp_path):
    # equal decay powers keep d_phi/d_l bounded: h(R) = inf
    data = ComparisonData(d_l=_pp(1, -1.5), d_phi=_pp(1, -1.5),
                          c_l=_pp(1, -1), c_phi=_pp(1, -1))
    rep = upper_bound_report(data, 500.0)
    assert math.isinf(rep.hR)
    assert rep.csv_fields()["hR"] == "inf"


def test_far_grid_reaches_minimizer_beyond_float_range():
    # log-only tail weights: R*sqrt(c_l c_phi) = R (log t)^(-1/2) decays
    # so slowly that it never meets the (convergent) integrated density
    # below the solve cap, and the true minimizer sits at log t ~ R^(2/3).
    # The report must fall back to closed-form evaluation in log t and
    # recover the finite infimum (frozen regression values at R = 1e6).
    def lg(c, a, b):
        return power_log(c, a, b, domain_start=math.e).as_comparison(
            monotonicity="nonincreasing")

    slow = lg(1.0, 0.0, -0.5)
    data = ComparisonData(d_l=lg(1.0, -0.9, 0.0), d_phi=lg(1.0, -1.6, 0.0),
                          c_l=slow, c_phi=slow)
    rep = upper_bound_report(data, 1.0e6)
    assert math.isinf(rep.TR)
    assert math.isinf(rep.t_best)
    assert any("far grid" in f for f in rep.flags)
    assert rep.core_B == pytest.approx(1666.622790, rel=1e-6)
    assert rep.B_upper == pytest.approx(190412.092968, rel=1e-6)
    # without the far grid the capped finite-t search floors out at
    # R / sqrt(log cap) ~ R/5.9 -- two orders above the true infimum
    assert rep.B_upper < 1.0e6 / 4.0

    with pytest.raises(CapError):
        upper_bound_report(data, 1.0e6, mode="at_T")
