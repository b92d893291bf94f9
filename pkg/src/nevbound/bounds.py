"""Evaluation of the growth-bound machinery.

Given nonincreasing majorants (d_l, d_phi) for lengths and angle
increments and (c_l, c_phi) for the weighted tail sums, the upper bound
on log max_{|z|=R} ||W(z)|| is

    9 * inf_{t>=1} ( max{ G(t,R), R*sqrt(c_l*c_phi)(t) } + L(t,R) )

where G integrates a three-regime density split at the thresholds k(R)
(end of the logarithmic regime) and h(R) (end of the square-root
regime), and L is a six-summand remainder that is usually O(log R).
The companion lower bound is the generalized inverse of
D = 1/(d_l*d_phi) evaluated at R.

The two sides sandwich the measured growth; ``verify_bound_sandwich``
performs that comparison per radius after normalizing the majorant
constants.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import integrate, optimize

from .regvar import (
    ComparisonFunction,
    DomainError,
    PowerLogFunction,
    generalized_inverse,
)

__all__ = [
    "ComparisonData",
    "MajorizationReport",
    "BoundReport",
    "CapError",
    "HypothesisViolation",
    "check_majorization",
    "k_of_R",
    "h_of_R",
    "g_integral",
    "integrated_density_table",
    "L_term",
    "solve_T",
    "upper_bound_report",
    "lower_bound",
    "verify_bound_sandwich",
    "auto_psi",
    "bound_reports_to_csv",
    "bound_reports_to_json",
]


class CapError(RuntimeError):
    """A numeric search hit its hard cap before satisfying its goal."""


class HypothesisViolation(ValueError):
    """A majorization hypothesis fails with an identified witness."""


# --------------------------------------------------------------------------
# comparison data
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonData:
    """The four majorants plus reference angle for the bound machinery.

    d_l, d_phi majorize lengths and |sin(angle increments)| pointwise;
    c_l, c_phi majorize the tail sums sum_{j>N} l_j and
    sum_{j>N} l_j sin^2(phi_j - psi).  All four must be nonincreasing,
    with d_phi <= 1 and c_phi <= c_l.
    """

    d_l: ComparisonFunction
    d_phi: ComparisonFunction
    c_l: ComparisonFunction
    c_phi: ComparisonFunction
    psi: float = 0.0
    constants: dict = field(default_factory=dict)

    def validate(self, t_max: float = 1e9, samples: int = 200) -> None:
        ts = np.exp(np.linspace(0.0, math.log(t_max), samples))
        for name in ("d_l", "d_phi", "c_l", "c_phi"):
            f = getattr(self, name)
            vals = np.asarray(f(ts), dtype=float)
            if np.any(vals <= 0):
                raise ValueError(f"{name} must be positive")
            if np.any(np.diff(vals) > 1e-12 * vals[:-1]):
                raise ValueError(f"{name} is not nonincreasing on the test grid")
        if np.any(np.asarray(self.d_phi(ts)) > 1.0 + 1e-12):
            raise ValueError("d_phi must be <= 1")
        if np.any(
            np.asarray(self.c_phi(ts)) > np.asarray(self.c_l(ts)) * (1 + 1e-12)
        ):
            raise ValueError("c_phi must be <= c_l")

    def rescaled(self, C_dl: float, C_dphi: float, C_cl: float, C_cphi: float
                 ) -> "ComparisonData":
        """Scale each majorant by its fitted constant, re-capping the
        hard inequalities d_phi <= 1 and c_phi <= c_l (both caps keep
        the scaled functions valid majorants)."""
        d_l = self.d_l.scaled(C_dl)
        d_phi = self.d_phi.scaled(C_dphi).capped(1.0)
        c_l = self.c_l.scaled(C_cl)
        c_phi_s = self.c_phi.scaled(C_cphi)

        def phi_handle(t):
            return np.minimum(np.asarray(c_phi_s(t)), np.asarray(c_l(t)))

        c_phi = ComparisonFunction(
            handle=phi_handle,
            declared_index=c_phi_s.declared_index,
            monotonicity="nonincreasing",
            description=f"min({c_phi_s.description}, {c_l.description})",
        )
        return ComparisonData(
            d_l=d_l, d_phi=d_phi, c_l=c_l, c_phi=c_phi, psi=self.psi,
            constants={"d_l": C_dl, "d_phi": C_dphi, "c_l": C_cl,
                       "c_phi": C_cphi},
        )


# --------------------------------------------------------------------------
# majorization check
# --------------------------------------------------------------------------


@dataclass
class MajorizationReport:
    constants: dict          # smallest admissible multiplicative constants
    witnesses: dict          # index where each constant is attained
    N_check: int
    exact_form: bool         # all constants <= 1 (+ tolerance)

    def max_constant(self) -> float:
        return max(self.constants.values())


def check_majorization(H, data: ComparisonData, N_check: int
                       ) -> MajorizationReport:
    """Smallest multiplicative constants making the four majorization
    inequalities hold on the checked range.

    Pointwise: l_j <= C * d_l(j) and |sin(phi_{j+1}-phi_j)| <= C * d_phi(j).
    Tails (for every N < N_check):  sum_{j>N} l_j <= C * c_l(N)  and
    sum_{j>N} l_j sin^2(phi_j - psi) <= C * c_phi(N); the part of the sums
    beyond the checked range uses the Hamiltonian's declared tail
    majorant (zero for finite explicit data).

    Raises HypothesisViolation when a ratio keeps growing through the
    checked range (the inequality then fails at every scaling).
    """
    l = np.asarray(H.lengths(N_check), dtype=float)
    phi = np.asarray(H.angles(N_check), dtype=float)
    j = np.arange(1, N_check + 1, dtype=float)

    ratios_dl = l / np.asarray(data.d_l(j))
    i_dl = int(np.argmax(ratios_dl))
    C_dl = float(ratios_dl[i_dl])

    dphi_vals = np.abs(np.sin(np.diff(phi)))
    ratios_dphi = dphi_vals / np.asarray(data.d_phi(j[:-1]))
    i_dphi = int(np.argmax(ratios_dphi))
    C_dphi = float(ratios_dphi[i_dphi])

    tail_l = float(H.tail_upper(N_check))
    suffix_l = np.concatenate([np.cumsum(l[::-1])[::-1][1:], [0.0]]) + tail_l
    # suffix_l[N-1] = sum_{j>N} l_j (within range) + declared tail
    Ns = np.arange(1, N_check + 1, dtype=float)
    ratios_cl = suffix_l / np.asarray(data.c_l(Ns))
    i_cl = int(np.argmax(ratios_cl))
    C_cl = float(ratios_cl[i_cl])

    w = l * np.sin(phi - data.psi) ** 2
    tail_w = float(H.tail_phi_upper(N_check, data.psi))
    suffix_w = np.concatenate([np.cumsum(w[::-1])[::-1][1:], [0.0]]) + tail_w
    ratios_cphi = suffix_w / np.asarray(data.c_phi(Ns))
    i_cphi = int(np.argmax(ratios_cphi))
    C_cphi = float(ratios_cphi[i_cphi])

    constants = {"d_l": C_dl, "d_phi": C_dphi, "c_l": C_cl, "c_phi": C_cphi}
    witnesses = {"d_l": i_dl + 1, "d_phi": i_dphi + 1, "c_l": i_cl + 1,
                 "c_phi": i_cphi + 1}

    # systematic growth of a pointwise ratio signals an unbounded quotient
    for name, ratios in (("d_l", ratios_dl), ("d_phi", ratios_dphi)):
        half = len(ratios) // 2
        if half >= 8:
            first, second = np.max(ratios[:half]), np.max(ratios[half:])
            if second > 4.0 * first and second > 10.0:
                raise HypothesisViolation(
                    f"ratio for {name} grows through the checked range "
                    f"(witness j={int(np.argmax(ratios)) + 1}, "
                    f"ratio {second:.3g}); majorant too small by any constant"
                )

    exact = all(c <= 1.0 + 1e-9 for c in constants.values())
    return MajorizationReport(constants=constants, witnesses=witnesses,
                              N_check=N_check, exact_form=exact)


# --------------------------------------------------------------------------
# thresholds k(R), h(R)
# --------------------------------------------------------------------------


def k_of_R(data: ComparisonData, R: float) -> float:
    """End of the logarithmic regime: the running-sup inverse of
    s -> 2/(R (d_l d_phi)(s)) at level 1."""
    d1 = float(data.d_l(1.0)) * float(data.d_phi(1.0))
    if R < 2.0 / d1 * (1 - 1e-12):
        raise DomainError(
            f"R={R:g} below the domain threshold 2/(d_l*d_phi)(1)={2.0 / d1:g}"
        )

    def f(s):
        s = np.asarray(s, dtype=float)
        return 2.0 / (np.asarray(data.d_l(s)) * np.asarray(data.d_phi(s)))

    return generalized_inverse(f, R)


def h_of_R(data: ComparisonData, R: float) -> float:
    """End of the square-root regime: running-sup inverse of
    s -> d_phi(s)/d_l(s) at level R."""
    q1 = float(data.d_phi(1.0)) / float(data.d_l(1.0))
    if R < q1 * (1 - 1e-12):
        raise DomainError(
            f"R={R:g} below the domain threshold d_phi(1)/d_l(1)={q1:g}"
        )

    def f(s):
        s = np.asarray(s, dtype=float)
        return np.asarray(data.d_phi(s)) / np.asarray(data.d_l(s))

    return generalized_inverse(f, R)


# --------------------------------------------------------------------------
# the integrated density
# --------------------------------------------------------------------------


def _density(data: ComparisonData, R: float, kR: float, hR: float,
             s) -> np.ndarray:
    """Three-regime growth density: log(R d_l d_phi) below k(R),
    sqrt(R d_l d_phi) between k(R) and h(R), R*d_l beyond h(R)."""
    s = np.asarray(s, dtype=float)
    dl = np.asarray(data.d_l(s), dtype=float)
    dphi = np.asarray(data.d_phi(s), dtype=float)
    prod = R * dl * dphi
    out = np.where(s < kR, np.log(np.maximum(prod, 1e-300)), np.sqrt(prod))
    if math.isfinite(hR):
        out = np.where(s >= hR, R * dl, out)
    return out


def g_integral(data: ComparisonData, t: float, R: float,
               kR: Optional[float] = None, hR: Optional[float] = None) -> float:
    """Integral of the growth density over [1, t], split exactly at the
    regime thresholds (adaptive quadrature in log-space)."""
    t = float(t)
    if t < 1.0:
        raise DomainError(f"t must be >= 1, got {t}")
    if t == 1.0:
        return 0.0
    if kR is None:
        kR = k_of_R(data, R)
    if hR is None:
        hR = h_of_R(data, R)
    edges = [1.0]
    for cut in (kR, hR):
        if math.isfinite(cut) and 1.0 < cut < t:
            edges.append(cut)
    edges.append(t)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        ulo, uhi = math.log(lo), math.log(hi)
        knots = np.linspace(ulo, uhi, max(2, int(math.ceil((uhi - ulo) / 4.6)) + 1))
        for a, b in zip(knots[:-1], knots[1:]):
            val, _ = integrate.quad(
                lambda u: float(
                    _density(data, R, kR, hR, math.exp(u))
                ) * math.exp(u),
                a, b, limit=200, epsabs=0.0, epsrel=1e-11,
            )
            total += val
    return total


# 5-point Gauss-Legendre nodes/weights on [0, 1]
_GL_X = (np.polynomial.legendre.leggauss(5)[0] + 1.0) / 2.0
_GL_W = np.polynomial.legendre.leggauss(5)[1] / 2.0


class integrated_density_table:
    """Fast evaluator of the integrated density for one (data, R).

    Pre-tabulates cumulative Gauss-Legendre integrals on a geometric
    grid (128 points per decade, thresholds inserted exactly) and
    answers queries by cumulative value + partial-cell correction.
    Agrees with ``g_integral`` to ~1e-9 relative; extends itself lazily.
    """

    POINTS_PER_DECADE = 128

    def __init__(self, data: ComparisonData, R: float):
        self.data = data
        self.R = float(R)
        self.kR = k_of_R(data, R)
        self.hR = h_of_R(data, R)
        self._ts = np.asarray([1.0])
        self._cum = np.asarray([0.0])
        self._extend_to(16.0)

    def _cell_integrals(self, ts: np.ndarray) -> np.ndarray:
        """Integral of the density over each [ts[i], ts[i+1]] via GL5 in
        log-space."""
        u = np.log(ts)
        lo, w = u[:-1], np.diff(u)
        nodes = lo[:, None] + w[:, None] * _GL_X[None, :]
        s = np.exp(nodes)
        vals = _density(self.data, self.R, self.kR, self.hR, s.ravel())
        vals = vals.reshape(s.shape) * s  # d s = e^u d u
        return (vals * _GL_W[None, :]).sum(axis=1) * w

    def _extend_to(self, t: float) -> None:
        t_hi = self._ts[-1]
        if t <= t_hi:
            return
        n = max(2, int(math.ceil(
            math.log10(t / t_hi) * self.POINTS_PER_DECADE)) + 1)
        new = np.exp(np.linspace(math.log(t_hi), math.log(t), n))
        for cut in (self.kR, self.hR):
            if math.isfinite(cut) and t_hi < cut < t:
                new = np.sort(np.append(new, cut))
        cells = self._cell_integrals(new)
        cum = self._cum[-1] + np.concatenate([[0.0], np.cumsum(cells)])
        self._ts = np.concatenate([self._ts, new[1:]])
        self._cum = np.concatenate([self._cum, cum[1:]])

    def value(self, t) -> float:
        t = float(t)
        if t <= 1.0:
            return 0.0
        if t > self._ts[-1]:
            self._extend_to(t * 2.0)
        i = int(np.searchsorted(self._ts, t, side="right")) - 1
        i = min(i, len(self._ts) - 2)
        base = self._cum[i]
        lo = self._ts[i]
        if t <= lo:
            return float(base)
        pair = np.asarray([lo, t])
        return float(base + self._cell_integrals(pair)[0])

    __call__ = value


# --------------------------------------------------------------------------
# remainder term L(t, R)
# --------------------------------------------------------------------------


def _logplus(x: float) -> float:
    return math.log(x) if x > 1.0 else 0.0


_TELESCOPE_DIRECT_CAP = 300_000
_TELESCOPE_HARD_CAP = 100_000_000


def _telescope(data: ComparisonData, m: int) -> float:
    """sum_{j=1}^{m-1} |log q(j) - log q(j+1)| for q = d_phi/d_l.

    Direct vectorized summation for moderate m.  For power-log
    quotients (no caps in the way) the sum collapses exactly on
    monotone stretches, so only the integer breakpoints of q matter;
    that handles astronomically large m at O(1) cost.
    """
    if m <= 1:
        return 0.0
    if m <= _TELESCOPE_DIRECT_CAP:
        j = np.arange(1, m + 1, dtype=float)
        q = np.asarray(data.d_phi(j), dtype=float) / np.asarray(
            data.d_l(j), dtype=float
        )
        return float(np.abs(np.diff(np.log(q))).sum())

    pl_phi = data.d_phi.powerlog if data.d_phi.cap is None else None
    pl_l = data.d_l.powerlog if data.d_l.cap is None else None
    if pl_phi is None or pl_l is None:
        raise CapError(
            f"telescope with m={m} and non-power-log quotient exceeds the "
            f"direct-summation cap {_TELESCOPE_DIRECT_CAP}"
        )
    q = pl_phi / pl_l
    a, b = q.power, q.logpower
    # the continuous quotient is monotone except for at most one interior
    # extremum at log t = -b/a; below the domain start it is constant
    candidates = {1, 2, 3, 4, m}
    if a != 0.0 and b != 0.0:
        x = -b / a
        if x > 1.0:
            tstar = math.exp(x)
            if 3.0 < tstar < m:
                candidates.add(int(math.floor(tstar)))
                candidates.add(int(math.ceil(tstar)))
    pts = sorted(c for c in candidates if 1 <= c <= m)

    def logq(j: int) -> float:
        jj = max(float(j), q.domain_start)
        out = math.log(q.coefficient) + a * math.log(jj)
        if b != 0.0:
            # pure-power quotients have domain start 1, where log log
            # would blow up; they carry no log factor, so skip the term
            out += b * math.log(math.log(jj))
        return out

    total = 0.0
    for p0, p1 in zip(pts[:-1], pts[1:]):
        if p1 - p0 <= 4:
            for jj in range(p0, p1):
                total += abs(logq(jj + 1) - logq(jj))
        else:
            total += abs(logq(p1) - logq(p0))
    return total


def L_term(data: ComparisonData, t: float, R: float,
           hR: Optional[float] = None) -> float:
    """The six-summand remainder of the upper bound:

    1 + log+ R + log+(c_l/c_phi)(ceil t) + log+(d_l/d_phi)(1)
      + log+(d_l/d_phi)(m) + telescope(m),   m = min(ceil t, floor h(R))

    (the min with an infinite h(R) is just ceil t).
    """
    if t < 1.0:
        raise DomainError(f"t must be >= 1, got {t}")
    if hR is None:
        hR = h_of_R(data, R)
    tc = int(math.ceil(t))
    if math.isfinite(hR):
        assert hR >= 1.0, "h(R) < 1 is unreachable (k <= h with k >= 1)"
        m = min(tc, int(math.floor(hR)))
    else:
        m = tc
    m = max(m, 1)
    out = 1.0
    out += _logplus(R)
    out += _logplus(float(data.c_l(tc)) / float(data.c_phi(tc)))
    out += _logplus(float(data.d_l(1.0)) / float(data.d_phi(1.0)))
    out += _logplus(float(data.d_l(m)) / float(data.d_phi(m)))
    out += _telescope(data, m)
    return out


# --------------------------------------------------------------------------
# crossing time T(R)
# --------------------------------------------------------------------------

_T_CAP = 1.0e15


def _rc_side(data: ComparisonData, R: float, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return R * np.sqrt(
        np.asarray(data.c_l(t), dtype=float)
        * np.asarray(data.c_phi(t), dtype=float)
    )


def solve_T(data: ComparisonData, R: float, tol: float = 1e-8,
            table: Optional[integrated_density_table] = None) -> float:
    """The unique crossing of the increasing integrated density with the
    nonincreasing t -> R*sqrt(c_l c_phi)(t).

    Doubles an upper bracket until the sign changes, then Brent.  The
    residual |G - RC|/max(1, value) is checked against ``tol``.
    """
    g = table if table is not None else integrated_density_table(data, R)

    def phi(t: float) -> float:
        return g.value(t) - float(_rc_side(data, R, t))

    hi = 2.0
    while phi(hi) <= 0.0:
        hi *= 4.0
        if hi > _T_CAP:
            raise CapError(
                f"no crossing below t={_T_CAP:g}: tail majorants do not decay "
                f"(R*sqrt(c_l c_phi) stays above the integrated density)"
            )
    lo = max(1.0, hi / 4.0)
    while phi(lo) > 0.0:
        lo = max(1.0, lo / 4.0)
        if lo == 1.0:
            break
    T = float(optimize.brentq(phi, lo, hi, xtol=1e-12, rtol=1e-14))
    val_g = g.value(T)
    val_rc = float(_rc_side(data, R, T))
    if abs(val_g - val_rc) > tol * max(1.0, val_g):
        raise RuntimeError(
            f"crossing residual {abs(val_g - val_rc):.3g} exceeds tolerance "
            f"at T={T:g} (G={val_g:.6g}, RC={val_rc:.6g})"
        )
    return T


# --------------------------------------------------------------------------
# far grid: the infimum beyond the representable t range
# --------------------------------------------------------------------------

# When the tail weights decay only logarithmically, the minimizer of the
# bound objective can sit at log t comparable to a power of R -- far past
# anything a float can hold as t.  With power-log comparison data every
# ingredient of the objective is a closed form in u = log t, so the
# infimum can be chased out there exactly; t itself is never formed.

_FAR_ANCHOR = 1.0e10
_FAR_POINTS = 1200
_FAR_TELESCOPE_BASE = 250_000


def _plu_log(pl: PowerLogFunction, u) -> np.ndarray:
    """log pl(e^u), elementwise, for u well above log(domain_start)."""
    out = math.log(pl.coefficient) + pl.power * np.asarray(u, dtype=float)
    if pl.logpower != 0.0:
        out = out + pl.logpower * np.log(np.asarray(u, dtype=float))
    return out


def _sqrt_product_pl(f: ComparisonFunction,
                     g: ComparisonFunction) -> PowerLogFunction:
    """Symbolic sqrt(f*g) of two power-log-tagged functions."""
    pf, pg = f.powerlog, g.powerlog
    return PowerLogFunction(
        coefficient=math.sqrt(pf.coefficient * pg.coefficient),
        power=0.5 * (pf.power + pg.power),
        logpower=0.5 * (pf.logpower + pg.logpower),
        domain_start=max(pf.domain_start, pg.domain_start),
    )


def _plu_integral(pl: PowerLogFunction, u0: float, u1):
    """integral of pl(s) ds, s from e^{u0} to e^{u1}, in u coordinates.

    Exact for power -1 (any log power: the substitution s = e^v turns
    the integrand into a pure power of v) and for log-free tails;
    otherwise the Karamata primitive s^{p+1} (log s)^q / (p+1), whose
    relative error is O(|q| / ((-p-1) u0)).  Returns (value, exact).
    """
    c, p, q = pl.coefficient, pl.power, pl.logpower
    u1 = np.asarray(u1, dtype=float)
    if p == -1.0:
        if q == -1.0:
            return c * (np.log(u1) - math.log(u0)), True
        return c * (u1 ** (q + 1.0) - u0 ** (q + 1.0)) / (q + 1.0), True
    a = p + 1.0
    if q == 0.0:
        return c * (np.exp(np.minimum(a * u1, 700.0))
                    - math.exp(min(a * u0, 700.0))) / a, True
    if p < -1.0:
        val = (c / -a) * (math.exp(min(a * u0, 700.0)) * u0 ** q
                          - np.exp(np.minimum(a * u1, 700.0)) * u1 ** q)
        return val, False
    raise CapError(
        f"far integral of t^{p:g} (log t)^{q:g}: divergent with no exact "
        f"primitive; the finite-t grid must handle this case"
    )


def _far_infimum(data: ComparisonData, R: float, table,
                 hR: float) -> Optional[dict]:
    """Minimize the bound objective over t in [anchor, e^{u_max}] using
    u = log t closed forms; None when the machinery does not apply.

    Requirements: h(R) infinite (the density never leaves its
    square-root regime, so the integrated density continues as one
    closed form), all four comparison functions power-log tagged with
    caps inactive past the anchor, and the square-root density decaying
    at least like 1/t (otherwise the integrated density blows up
    polynomially and the ordinary grid already reaches the minimizer).
    """
    if not math.isinf(hR):
        return None
    funcs = (data.d_l, data.d_phi, data.c_l, data.c_phi)
    if any(f.powerlog is None for f in funcs):
        return None
    t0 = max(_FAR_ANCHOR, 16.0 * table.kR)
    if not t0 < 0.1 * _T_CAP:
        return None
    # a cap still active at the far anchor (or, for the d's, at the
    # telescope base) means the symbolic form does not describe the tail
    for f in (data.c_l, data.c_phi):
        if f.cap is not None and float(f.powerlog(t0)) > f.cap:
            return None
    for f in (data.d_l, data.d_phi):
        if f.cap is not None and float(
                f.powerlog(float(_FAR_TELESCOPE_BASE))) > f.cap:
            return None
    dens = _sqrt_product_pl(data.d_l, data.d_phi)
    if dens.power > -1.0:
        return None
    weight = _sqrt_product_pl(data.c_l, data.c_phi)
    if weight.power > 0.0:
        return None
    qpl = data.d_phi.powerlog / data.d_l.powerlog
    u_M = math.log(float(_FAR_TELESCOPE_BASE))
    if qpl.power != 0.0 and qpl.logpower != 0.0:
        # the quotient's lone extremum must lie below the telescope base
        # so the final stretch of the telescope is a single monotone run
        if -qpl.logpower / qpl.power > u_M:
            return None

    u0 = math.log(t0)
    u_max = max(1.0e6, R * R, 100.0 * u0)
    us = np.geomspace(u0, u_max, _FAR_POINTS)
    g_base = table.value(t0)
    integ, exact = _plu_integral(dens, u0, us)
    g_u = g_base + math.sqrt(R) * integ
    rc_u = R * np.exp(np.minimum(_plu_log(weight, us), 700.0))
    core_vals = np.maximum(g_u, rc_u)

    # the remainder term L, summand by summand, as functions of u (the
    # difference between t and ceil(t) is O(1/t) in every log here)
    d1 = _logplus(float(data.d_l(1.0)) / float(data.d_phi(1.0)))
    tele_base = _telescope(data, _FAR_TELESCOPE_BASE)
    lr_c = _plu_log(data.c_l.powerlog, us) - _plu_log(data.c_phi.powerlog, us)
    lr_d = _plu_log(data.d_l.powerlog, us) - _plu_log(data.d_phi.powerlog, us)
    tele = tele_base + np.abs(_plu_log(qpl, us) - float(_plu_log(qpl, u_M)))
    L_u = (1.0 + _logplus(R) + np.maximum(lr_c, 0.0) + d1
           + np.maximum(lr_d, 0.0) + tele)
    full_vals = core_vals + L_u

    i_full = int(np.argmin(full_vals))
    i_core = int(np.argmin(core_vals))
    return {
        "full": float(full_vals[i_full]), "full_u": float(us[i_full]),
        "core": float(core_vals[i_core]), "core_u": float(us[i_core]),
        "exact": bool(exact),
    }


# --------------------------------------------------------------------------
# the assembled upper bound
# --------------------------------------------------------------------------


@dataclass
class BoundReport:
    R: float
    kR: float
    hR: float
    TR: float
    g_at_T: float
    RC_at_T: float
    L_at_T: float
    B_upper: float                 # 9 * inf(max{G, RC} + L)
    core_B: float                  # inf max{G, RC}  (no remainder, no 9)
    t_best: float
    lower_Dinv: Optional[float] = None
    logM: Optional[float] = None
    margin_upper: Optional[float] = None
    margin_lower_ratio: Optional[float] = None
    trivial: bool = False
    flags: List[str] = field(default_factory=list)

    def csv_fields(self) -> dict:
        def enc(x):
            if x is None:
                return ""
            if math.isinf(x):
                return "inf"
            return repr(float(x))

        return {
            "R": enc(self.R), "kR": enc(self.kR), "hR": enc(self.hR),
            "TR": enc(self.TR), "gT": enc(self.g_at_T),
            "RCinvT": enc(self.RC_at_T), "LT": enc(self.L_at_T),
            "B_upper": enc(self.B_upper), "lower_Dinv": enc(self.lower_Dinv),
            "logM": enc(self.logM), "margin_upper": enc(self.margin_upper),
        }


def upper_bound_report(data: ComparisonData, R: float,
                       mode: str = "grid_infimum",
                       points_per_decade: int = 64) -> BoundReport:
    """Evaluate the upper bound at one radius.

    mode "at_T" evaluates the objective at the crossing time only; mode
    "grid_infimum" minimizes over a geometric grid (the crossing time is
    always one of the candidates, so the grid infimum can never exceed
    the at-T value) with golden-section refinement of the best bracket.
    """
    table = integrated_density_table(data, R)
    kR, hR = table.kR, table.hR
    try:
        T = solve_T(data, R, table=table)
    except CapError:
        # no g/RC crossing below the search cap.  This really happens
        # (c's decaying only logarithmically while the density integral
        # converges); the bound is still finite as a grid infimum with
        # the remainder term supplying the growth in t.
        T = math.inf

    def objective(t: float) -> float:
        return max(table.value(t), float(_rc_side(data, R, t))) + L_term(
            data, t, R, hR=hR
        )

    if mode == "at_T":
        if not math.isfinite(T):
            raise CapError(
                "mode 'at_T' needs a g/RC crossing, but none exists below "
                f"t={_T_CAP:g}; use mode 'grid_infimum'"
            )
        best_t, best_val = T, objective(T)
    elif mode == "grid_infimum":
        if math.isfinite(T):
            t_top = max(4.0 * T, 16.0)
            if math.isfinite(hR):
                t_top = max(t_top, min(hR, 1.0e12))
            ppd = points_per_decade
        else:
            t_top = _T_CAP
            ppd = min(points_per_decade, 32)
        n = max(8, int(math.ceil(math.log10(t_top) * ppd)) + 1)
        grid = np.exp(np.linspace(0.0, math.log(t_top), n))
        cands = list(grid) + ([T] if math.isfinite(T) else [])
        vals = [objective(t) for t in cands]
        i = int(np.argmin(vals))
        best_t, best_val = cands[i], vals[i]
        # golden-section refinement inside the best grid bracket
        if 0 < i < len(grid) - 1:
            a, b = grid[i - 1], grid[i + 1]
            gr = (math.sqrt(5.0) - 1.0) / 2.0
            x1 = b - gr * (b - a)
            x2 = a + gr * (b - a)
            f1, f2 = objective(x1), objective(x2)
            for _ in range(40):
                if f1 <= f2:
                    b, x2, f2 = x2, x1, f1
                    x1 = b - gr * (b - a)
                    f1 = objective(x1)
                else:
                    a, x1, f1 = x1, x2, f2
                    x2 = a + gr * (b - a)
                    f2 = objective(x2)
            for t_c in (x1, x2, math.floor(x1), math.ceil(x2)):
                t_c = max(1.0, float(t_c))
                v = objective(t_c)
                if v < best_val:
                    best_t, best_val = t_c, v
    else:
        raise ValueError(f"unknown mode {mode!r}")

    # the core infimum (no remainder term) over the same candidate set
    def core_obj(t: float) -> float:
        return max(table.value(t), float(_rc_side(data, R, t)))

    if math.isfinite(T):
        core = core_obj(T)
        core_top = max(4.0 * T, 16.0)
    else:
        core = math.inf
        core_top = _T_CAP
    if mode == "grid_infimum":
        tgrid = np.exp(np.linspace(0.0, math.log(core_top), 400))
        core = min(core, min(core_obj(t) for t in tgrid))

    # chase the minimizer past the representable t range when the data
    # supports closed-form evaluation in log t (slowly decaying tail
    # weights push it out to log t ~ a power of R)
    far = _far_infimum(data, R, table, hR) if mode == "grid_infimum" else None
    far_won = far is not None and far["full"] < best_val
    if far_won:
        best_val = far["full"]
        best_t = (math.exp(far["full_u"]) if far["full_u"] < 700.0
                  else math.inf)
    if far is not None and far["core"] < core:
        core = far["core"]

    # the per-crossing diagnostics; with no crossing they describe the
    # minimizing grid point instead
    t_diag = T if math.isfinite(T) else min(best_t, _T_CAP)
    g_T = table.value(t_diag)
    rc_T = float(_rc_side(data, R, t_diag))
    L_T = L_term(data, t_diag, R, hR=hR)

    B_upper = 9.0 * best_val
    trivial = B_upper >= 0.5 * R
    flags = []
    if not math.isfinite(T):
        flags.append("no g/RC crossing below the solve cap; grid infimum only")
    if far_won:
        flags.append(
            f"minimizer on the far grid at log t = {far['full_u']:.6g} "
            "(closed-form evaluation in log t)"
        )
    if far is not None and not far["exact"]:
        flags.append("far-grid density integral uses an asymptotic primitive")
    if trivial:
        flags.append("bound >= R/2: trivial regime (non-decaying tails?)")
    if R < 64.0:
        flags.append("small R: asymptotic supporting estimates may be loose")
    return BoundReport(
        R=R, kR=kR, hR=hR, TR=T, g_at_T=g_T, RC_at_T=rc_T, L_at_T=L_T,
        B_upper=B_upper, core_B=core, t_best=best_t, trivial=trivial,
        flags=flags,
    )


# --------------------------------------------------------------------------
# lower bound
# --------------------------------------------------------------------------


def lower_bound(d_l: ComparisonFunction, d_phi: ComparisonFunction,
                R: float) -> float:
    """Generalized inverse of D = 1/(d_l d_phi) at R.

    Callers must pass *lower* majorants (l_j >= d_l(j) etc.); the result
    is the comparison function whose ratio to measured growth is bounded
    below -- constants are empirical by nature.
    """
    il, ip = d_l.declared_index, d_phi.declared_index
    if il is not None and ip is not None and il + ip >= 0:
        raise ValueError(
            f"D = 1/(d_l d_phi) must be eventually increasing; declared "
            f"indices sum to {il + ip} >= 0"
        )

    def D(s):
        s = np.asarray(s, dtype=float)
        return 1.0 / (np.asarray(d_l(s)) * np.asarray(d_phi(s)))

    return generalized_inverse(D, R)


# --------------------------------------------------------------------------
# sandwich verification
# --------------------------------------------------------------------------


def auto_psi(H, N: int, grid: int = 64) -> float:
    """Reference angle minimizing the empirical weighted tail sum
    (smaller c_phi data gives a better bound)."""
    l = np.asarray(H.lengths(N), dtype=float)
    phi = np.asarray(H.angles(N), dtype=float)
    psis = np.linspace(0.0, math.pi, grid, endpoint=False)
    tails = [
        float(np.sum(l[N // 4:] * np.sin(phi[N // 4:] - p) ** 2))
        for p in psis
    ]
    return float(psis[int(np.argmin(tails))])


def verify_bound_sandwich(H, data: ComparisonData, radii: Sequence[float],
                          eps: float = 1e-3,
                          lower_data: Optional[tuple] = None,
                          rescale: bool = True) -> List[BoundReport]:
    """Measured growth against both bounds, per radius.

    The majorants are first normalized by the smallest admissible
    constants found on the data range actually used (scaling a majorant
    family by its fitted constant keeps it a true majorant family), so
    the upper inequality is applied in its exact constants-1 form.
    margin_upper = B_upper - logM must be >= -eps; margin_lower_ratio
    records logM / D^-(R).
    """
    from . import monodromy  # deferred: bounds must stay import-light

    radii = sorted(float(r) for r in radii)
    N_max = monodromy.choose_truncation(data.c_l, data.c_phi, radii[-1], eps)
    report = check_majorization(H, data, N_check=N_max)
    use = data
    if rescale:
        use = data.rescaled(
            report.constants["d_l"], report.constants["d_phi"],
            report.constants["c_l"], report.constants["c_phi"],
        )
    out: List[BoundReport] = []
    for R in radii:
        br = upper_bound_report(use, R, mode="grid_infimum")
        logm = monodromy.log_max_on_circle(
            H, R, eps=eps, c_l=use.c_l, c_phi=use.c_phi
        )
        br.logM = logm
        br.margin_upper = br.B_upper - logm
        if lower_data is not None:
            dl_low, dphi_low = lower_data
            br.lower_Dinv = lower_bound(dl_low, dphi_low, R)
            br.margin_lower_ratio = logm / br.lower_Dinv
        out.append(br)
    return out


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

_CSV_COLUMNS = ["R", "kR", "hR", "TR", "gT", "RCinvT", "LT", "B_upper",
                "lower_Dinv", "logM", "margin_upper"]


def bound_reports_to_csv(reports: Sequence[BoundReport], path) -> None:
    import csv as _csv

    with open(path, "w", newline="") as fh:
        w = _csv.DictWriter(fh, fieldnames=_CSV_COLUMNS)
        w.writeheader()
        for r in reports:
            w.writerow(r.csv_fields())


def bound_reports_to_json(reports: Sequence[BoundReport], path) -> None:
    def enc(x):
        if x is None:
            return None
        if isinstance(x, float) and math.isinf(x):
            return "inf"
        return x

    docs = []
    for r in reports:
        d = {k: enc(getattr(r, k)) for k in (
            "R", "kR", "hR", "TR", "g_at_T", "RC_at_T", "L_at_T", "B_upper",
            "core_B", "t_best", "lower_Dinv", "logM", "margin_upper",
            "margin_lower_ratio", "trivial")}
        d["flags"] = list(r.flags)
        docs.append(d)
    with open(path, "w") as fh:
        json.dump(docs, fh, indent=2)
