"""Hamburger Hamiltonians: rank-one canonical-system data.

A Hamburger Hamiltonian is a sequence of interval lengths l_j > 0 and
rotation angles phi_j; on the j-th interval the system matrix is the
rank-one projection onto (cos phi_j, sin phi_j).  This module holds the
data model (explicit arrays or a lazy generator with declared tail
bounds), two constructive families used throughout the test corpus, and
the classical bijection with semi-infinite Jacobi matrices.

Conventions: indices are 1-based in formulas (l_1 is the first length);
returned arrays are 0-based with l[0] = l_1.  Jacobi off-diagonals must
be positive; the bridge normalizes to l_1 = 1, phi_1 = 0.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .regvar import ComparisonFunction, DomainError, power_log
from .bounds import ComparisonData

__all__ = [
    "HamburgerHamiltonian",
    "JacobiParameters",
    "new_validated",
    "alternating_decay_family",
    "prescribed_growth_family",
    "jacobi_from_hamiltonian",
    "hamiltonian_from_jacobi",
    "family_from_string",
]


_BLOCK = 65536


@dataclass
class HamburgerHamiltonian:
    """Length/angle data with optional lazy generation.

    ``generator(n0, n1)`` returns (lengths, angles) for 1-based indices
    n0..n1-1; ``tail_handle(N)`` returns an upper bound on the length
    tail sum beyond index N (None means: only finite data available).
    ``comparison`` optionally attaches ready-made majorant data and
    ``lower_pair`` pointwise minorants (d_l_low, d_phi_low) for the
    lower bound.
    """

    name: str = "explicit"
    generator: Optional[Callable[[int, int], Tuple[np.ndarray, np.ndarray]]] = None
    tail_handle: Optional[Callable[[float], float]] = None
    tail_phi_handle: Optional[Callable[[float], float]] = None
    psi_ref: float = 0.0
    comparison: Optional[ComparisonData] = None
    lower_pair: Optional[Tuple[ComparisonFunction, ComparisonFunction]] = None
    notes: List[str] = field(default_factory=list)
    _l: np.ndarray = field(default_factory=lambda: np.empty(0))
    _phi: np.ndarray = field(default_factory=lambda: np.empty(0))

    # -- data access -------------------------------------------------

    @property
    def n_available(self) -> float:
        return math.inf if self.generator is not None else len(self._l)

    def ensure(self, N: int) -> None:
        have = len(self._l)
        if N <= have:
            return
        if self.generator is None:
            raise IndexError(
                f"only {have} explicit intervals available, {N} requested"
            )
        while have < N:
            n1 = min(N, have + _BLOCK) + 1
            l_new, phi_new = self.generator(have + 1, n1)
            l_new = np.asarray(l_new, dtype=float)
            phi_new = np.asarray(phi_new, dtype=float)
            if np.any(l_new <= 0) or not np.all(np.isfinite(l_new)):
                raise ValueError(f"{self.name}: generated lengths not positive")
            self._l = np.concatenate([self._l, l_new])
            self._phi = np.concatenate([self._phi, phi_new])
            have = len(self._l)

    def lengths(self, N: int) -> np.ndarray:
        self.ensure(N)
        return self._l[:N]

    def angles(self, N: int) -> np.ndarray:
        self.ensure(N)
        return self._phi[:N]

    def tail_upper(self, N: int) -> float:
        """Upper bound on sum_{j>N} l_j."""
        if self.tail_handle is not None:
            return float(self.tail_handle(float(max(N, 1))))
        if self.generator is None:
            have = len(self._l)
            if N >= have:
                return 0.0
            return float(np.sum(self._l[N:]))
        raise DomainError(
            f"{self.name}: infinite family without a declared length-tail bound"
        )

    def tail_phi_upper(self, N: int, psi: float) -> float:
        """Upper bound on sum_{j>N} l_j sin^2(phi_j - psi).  A declared
        weighted handle is only valid for the reference angle it was
        computed with (mod pi); otherwise fall back on the length tail,
        which majorizes since sin^2 <= 1."""
        if self.tail_phi_handle is not None:
            diff = (psi - self.psi_ref + math.pi / 2.0) % math.pi - math.pi / 2.0
            if abs(diff) < 1e-9:
                return float(self.tail_phi_handle(float(max(N, 1))))
        return self.tail_upper(N)

    def total_length(self, N_probe: int = 4096) -> float:
        """sum l_j + declared tail at N_probe (exact for finite data)."""
        if self.generator is None:
            return float(np.sum(self._l))
        return float(np.sum(self.lengths(N_probe))) + self.tail_upper(N_probe)

    def limit_circle(self, N_probe: int = 4096) -> bool:
        """Total length finite <=> indeterminate (limit-circle) case."""
        return math.isfinite(self.total_length(N_probe))


def new_validated(lengths: Sequence[float], angles: Sequence[float],
                  name: str = "explicit") -> HamburgerHamiltonian:
    l = np.asarray(lengths, dtype=float)
    phi = np.asarray(angles, dtype=float)
    if l.ndim != 1 or phi.ndim != 1 or len(l) != len(phi):
        raise ValueError("lengths and angles must be 1-d arrays of equal size")
    if len(l) == 0:
        raise ValueError("need at least one interval")
    if np.any(~np.isfinite(l)) or np.any(l <= 0):
        raise ValueError("lengths must be positive and finite")
    if np.any(~np.isfinite(phi)):
        raise ValueError("angles must be finite")
    return HamburgerHamiltonian(name=name, _l=l.copy(), _phi=phi.copy())


# --------------------------------------------------------------------------
# family 1: power-decay lengths with alternating power-decay angles
# --------------------------------------------------------------------------


def alternating_decay_family(alpha: float, beta: float
                             ) -> HamburgerHamiltonian:
    """l_j = j^-alpha, phi_j = (-1)^j j^-beta.

    Needs alpha > 1 (summable lengths, limit circle) and
    alpha + 2*beta > 1 (summable weighted tails).  Ships with exact
    strict majorants (constants <= 1) and pointwise minorants:

      d_l(t) = t^-alpha                     (|that ratio| = 1)
      d_phi(t) = min(2 t^-beta, 1)          (|sin dphi_j| <= |dphi_j| <= 2 j^-beta)
      c_l(t) = t^(1-alpha)/(alpha-1)        (integral comparison)
      c_phi(t) = t^(1-alpha-2beta)/(alpha+2beta-1), psi = 0
      lower: d_l, 0.63 * t^-beta            (sin x >= (2/pi) x on [0, pi/2])
    """
    if alpha <= 1:
        raise ValueError(f"alpha must exceed 1 (got {alpha}): lengths not summable")
    if alpha + 2 * beta <= 1:
        raise ValueError(
            f"alpha + 2*beta must exceed 1 (got {alpha + 2 * beta}): "
            f"weighted tails not summable"
        )
    if beta < 0:
        raise ValueError(f"beta must be >= 0 (got {beta})")

    def gen(n0: int, n1: int):
        j = np.arange(n0, n1, dtype=float)
        return j ** (-alpha), (-1.0) ** np.arange(n0, n1) * j ** (-beta)

    d_l = power_log(1.0, -alpha, 0.0, domain_start=1.0).as_comparison()
    d_phi = power_log(2.0, -beta, 0.0, domain_start=1.0).as_comparison(
        monotonicity="nonincreasing").capped(1.0)
    c_l = power_log(1.0 / (alpha - 1.0), 1.0 - alpha, 0.0,
                    domain_start=1.0).as_comparison()
    c_phi_exp = 1.0 - alpha - 2.0 * beta
    c_phi = power_log(1.0 / (alpha + 2.0 * beta - 1.0), c_phi_exp, 0.0,
                      domain_start=1.0).as_comparison()
    comp = ComparisonData(d_l=d_l, d_phi=d_phi, c_l=c_l, c_phi=c_phi, psi=0.0)
    lower = (
        power_log(1.0, -alpha, 0.0, domain_start=1.0).as_comparison(),
        power_log(0.63, -beta, 0.0, domain_start=1.0).as_comparison(
            monotonicity="nonincreasing"),
    )
    return HamburgerHamiltonian(
        name=f"alternating_decay(alpha={alpha:g},beta={beta:g})",
        generator=gen,
        tail_handle=lambda N: N ** (1.0 - alpha) / (alpha - 1.0),
        tail_phi_handle=lambda N: N ** c_phi_exp / (alpha + 2.0 * beta - 1.0),
        psi_ref=0.0,
        comparison=comp,
        lower_pair=lower,
    )


# --------------------------------------------------------------------------
# family 2: prescribed growth via an increasing profile inverse
# --------------------------------------------------------------------------


def _resolve_growth_inverse(growth_inverse) -> Callable[[np.ndarray], np.ndarray]:
    if callable(growth_inverse):
        return lambda n: np.asarray(growth_inverse(n), dtype=float)
    sigma = float(growth_inverse)
    if sigma <= 0:
        raise ValueError("growth-inverse exponent must be positive")
    return lambda n: np.asarray(n, dtype=float) ** sigma


def prescribed_growth_family(variant: str, growth_inverse,
                             omega: Optional[float] = None,
                             gamma: Optional[float] = None,
                             omega_rho: Optional[float] = None,
                             ) -> HamburgerHamiltonian:
    """Hamiltonians whose transfer-matrix trace recursion realizes a
    prescribed growth profile.  ``growth_inverse`` is the inverse of the
    target profile (a callable, or an exponent sigma meaning n^sigma).

    variants:
      "rotation":  |omega| < 2.  psi = arccos(-omega/2), l_n =
                   1/(sin(psi) * ginv(n)), phi_n = (n-1)*psi.
      "minus2":    omega = -2 endpoint.  l_n = n/ginv(n), phi_{n+1} =
                   harmonic number H_n.
      "plus2":     omega = +2 endpoint.  l_n = n/ginv(n), phi_{n+1} =
                   n*pi - H_n.
      "sequence":  gamma > 0 and a perturbation sequence omega_n =
                   n^-omega_rho; l_n = 1/ginv(n), angle increments
                   pi/2 + omega_n/(2*(1+gamma)).
    """
    ginv = _resolve_growth_inverse(growth_inverse)

    if variant == "rotation":
        if omega is None or not (-2.0 < omega < 2.0):
            raise ValueError(
                f"rotation variant needs |omega| < 2, got {omega!r}; the "
                f"endpoint cases are the 'minus2'/'plus2' variants"
            )
        psi = math.acos(-omega / 2.0)
        s = math.sin(psi)

        def gen(n0, n1):
            n = np.arange(n0, n1, dtype=float)
            return 1.0 / (s * ginv(n)), (n - 1.0) * psi

        tail = _power_tail_handle(ginv, extra_power=0.0, scale=1.0 / s)
        name = f"prescribed_growth(rotation,omega={omega:g})"
    elif variant in ("minus2", "plus2"):
        sign = -1.0 if variant == "minus2" else 1.0

        def gen(n0, n1):
            n = np.arange(n0, n1, dtype=float)
            l = n / ginv(n)
            # phi_{n+1} = H_n (minus2) / n*pi - H_n (plus2); phi_1 = 0
            H_prev = _harmonic(n0 - 1)
            H = H_prev + np.cumsum(1.0 / n)
            Hn_minus1 = np.concatenate([[H_prev], H[:-1]])
            if sign < 0:
                phi = Hn_minus1
            else:
                phi = (n - 1.0) * math.pi - Hn_minus1
            return l, phi

        tail = _power_tail_handle(ginv, extra_power=1.0, scale=1.0)
        name = f"prescribed_growth({variant})"
    elif variant == "sequence":
        if gamma is None or gamma <= 0:
            raise ValueError("sequence variant needs gamma > 0")
        rho = 1.0 if omega_rho is None else float(omega_rho)
        if rho <= 0:
            raise ValueError("omega_rho must be positive")

        def gen(n0, n1):
            n = np.arange(n0, n1, dtype=float)
            l = 1.0 / ginv(n)
            k = np.arange(1, n1 - 1, dtype=float)
            incr = math.pi / 2.0 + k ** (-rho) / (2.0 * (1.0 + gamma))
            phi_all = np.concatenate([[0.0], np.cumsum(incr)])
            return l, phi_all[n0 - 1:n1 - 1]

        tail = _power_tail_handle(ginv, extra_power=0.0, scale=1.0)
        name = f"prescribed_growth(sequence,gamma={gamma:g},rho={rho:g})"
    else:
        raise ValueError(f"unknown variant {variant!r}")

    return HamburgerHamiltonian(name=name, generator=gen, tail_handle=tail)


def _harmonic(n: int) -> float:
    if n <= 0:
        return 0.0
    if n < 64:
        return float(np.sum(1.0 / np.arange(1, n + 1)))
    # Euler-Maclaurin; error O(n^-6)
    return (math.log(n) + 0.5772156649015328606 + 1.0 / (2 * n)
            - 1.0 / (12 * n ** 2) + 1.0 / (120 * n ** 4))


def _power_tail_handle(ginv, extra_power: float, scale: float):
    """Tail bound for l_n = scale * n^extra_power / ginv(n) when ginv is
    a pure power n^sigma (detected numerically); None otherwise."""
    try:
        v1, v2 = float(ginv(np.asarray([100.0]))[0]), float(
            ginv(np.asarray([10000.0]))[0])
        sigma = math.log(v2 / v1) / math.log(100.0)
    except Exception:
        return None
    p = sigma - extra_power  # l_n ~ scale * n^-p
    if p <= 1.0:
        return None
    # if ginv(n) = c*n^sigma exactly then c = v1/100^sigma and the tail
    # integral comparison is sharp; the 1.05 cushions a slightly non-pure
    # power profile
    c1 = 1.05 * scale * 100.0 ** sigma / v1
    return lambda N: c1 * N ** (1.0 - p) / (p - 1.0)


# --------------------------------------------------------------------------
# the Jacobi bridge
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class JacobiParameters:
    """Semi-infinite Jacobi data: diagonal a[n], off-diagonal b[n] > 0."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.ndim != 1 or b.ndim != 1 or len(a) != len(b):
            raise ValueError("a and b must be 1-d arrays of equal length")
        if len(b) == 0:
            raise ValueError("need at least one Jacobi coefficient pair")
        if np.any(b <= 0) or np.any(~np.isfinite(b)):
            raise ValueError("off-diagonal entries must be positive and finite")
        if np.any(~np.isfinite(a)):
            raise ValueError("diagonal entries must be finite")

    def __len__(self) -> int:
        return len(self.a)


def jacobi_from_hamiltonian(H: HamburgerHamiltonian, N: Optional[int] = None
                            ) -> JacobiParameters:
    """Forward bridge.  With dphi_j = (phi_{j+1} - phi_j) mod pi in (0, pi):

        b[n] = 1 / (sin(dphi_{n+1}) * sqrt(l_{n+1} l_{n+2}))
        a[0] = -cot(dphi_1) / l_1
        a[n] = -(cot(dphi_{n+1}) + cot(dphi_n)) / l_{n+1},  n >= 1.

    Consecutive angles that coincide mod pi make the off-diagonal blow
    up; that degenerate Hamiltonian has no Jacobi counterpart here.
    """
    if N is None:
        if H.generator is not None:
            raise ValueError("N is required for infinite families")
        N = len(H._l)
    if N < 2:
        raise ValueError("need at least two intervals for one Jacobi pair")
    l = np.asarray(H.lengths(N), dtype=float)
    phi = np.asarray(H.angles(N), dtype=float)
    d = np.mod(np.diff(phi), math.pi)
    sd = np.sin(d)
    if np.any(sd <= 1e-14):
        bad = int(np.argmin(sd)) + 1
        raise ValueError(
            f"angles {bad} and {bad + 1} coincide mod pi "
            f"(sin of increment {sd[bad - 1]:.2e}); bridge undefined"
        )
    cd = np.cos(d) / sd
    b = 1.0 / (sd * np.sqrt(l[:-1] * l[1:]))
    a = np.empty(N - 1)
    a[0] = -cd[0] / l[0]
    a[1:] = -(cd[1:] + cd[:-1]) / l[1:-1]
    return JacobiParameters(a=a, b=b)


def hamiltonian_from_jacobi(jp: JacobiParameters) -> HamburgerHamiltonian:
    """Inverse bridge via the orthogonal-polynomial recursion at z = 0.

    p and q are the first/second-kind solutions (p_0 = 1, q_0 = 0,
    q_1 = 1/b_0); then l_{n+1} = p_n^2 + q_n^2 and phi_{n+1} =
    atan2(q_n, p_n) mod pi.  The output is normalized: l_1 = 1,
    phi_1 = 0; the recursion runs in extended precision with log-space
    rescaling, so super-exponentially growing length sequences come out
    with accurate angles and lengths up to float range.
    """
    a = np.asarray(jp.a, dtype=np.longdouble)
    b = np.asarray(jp.b, dtype=np.longdouble)
    M = len(a)
    l = np.empty(M + 1, dtype=float)
    phi = np.empty(M + 1, dtype=float)
    p_prev, q_prev = np.longdouble(1.0), np.longdouble(0.0)
    l[0], phi[0] = 1.0, 0.0
    logscale = 0.0
    p_cur = -a[0] / b[0]
    q_cur = 1.0 / b[0]
    for n in range(1, M + 1):
        m2 = float(p_cur * p_cur + q_cur * q_cur)
        l[n] = m2 * math.exp(2.0 * logscale) if logscale else m2
        phi[n] = math.atan2(float(q_cur), float(p_cur)) % math.pi
        if n == M:
            break
        p_next = -(a[n] * p_cur + b[n - 1] * p_prev) / b[n]
        q_next = -(a[n] * q_cur + b[n - 1] * q_prev) / b[n]
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_next, q_next
        mag = max(abs(float(p_cur)), abs(float(q_cur)))
        if mag > 1e120:
            p_prev /= np.longdouble(mag)
            q_prev /= np.longdouble(mag)
            p_cur /= np.longdouble(mag)
            q_cur /= np.longdouble(mag)
            logscale += math.log(mag)
    if np.any(~np.isfinite(l)):
        raise OverflowError(
            "interval lengths exceed float range; the underlying moment "
            "problem is far into the determinate regime"
        )
    return HamburgerHamiltonian(
        name="from_jacobi", _l=l, _phi=phi,
    )


# --------------------------------------------------------------------------
# family grammar (shared with the command-line layer)
# --------------------------------------------------------------------------

_FAM_RE = re.compile(r"^\s*([a-zA-Z_][a-zA-Z0-9_-]*)\s*\((.*)\)\s*$", re.S)


def _split_args(body: str) -> List[str]:
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    last = "".join(cur).strip()
    if last:
        parts.append(last)
    return parts


def _kwargs(parts: List[str]) -> Tuple[List[str], dict]:
    pos, kw = [], {}
    for p in parts:
        if "=" in p and not p.startswith("("):
            k, v = p.split("=", 1)
            kw[k.strip()] = v.strip()
        else:
            pos.append(p)
    return pos, kw


def family_from_string(expr: str, base_dir: str = ".") -> HamburgerHamiltonian:
    """Parse a Hamiltonian family expression.

    Grammar (frozen, used verbatim by the command-line layer):
      example_b6(alpha, beta)        power-decay alternating family
      b83(variant, ...)              prescribed-growth family; variant in
                                     rotation/minus2/plus2/sequence with
                                     omega=, sigma=, gamma=, rho= params
      explicit(path.csv)             two-column CSV: length, angle
      jacobi(path.csv)               two-column CSV: diagonal, offdiagonal
    """
    m = _FAM_RE.match(expr)
    if not m:
        raise ValueError(f"cannot parse family expression {expr!r}")
    head, body = m.group(1), m.group(2)
    parts = _split_args(body)
    if head == "example_b6":
        if len(parts) != 2:
            raise ValueError("example_b6 takes exactly (alpha, beta)")
        return alternating_decay_family(float(parts[0]), float(parts[1]))
    if head == "b83":
        pos, kw = _kwargs(parts)
        if not pos:
            raise ValueError("b83 needs a variant as first argument")
        variant = pos[0]
        sigma = float(kw.pop("sigma", 2.0))
        omega = float(kw["omega"]) if "omega" in kw else None
        kw.pop("omega", None)
        gamma = float(kw.pop("gamma")) if "gamma" in kw else None
        rho = float(kw.pop("rho")) if "rho" in kw else None
        if kw:
            raise ValueError(f"unknown b83 parameters {sorted(kw)}")
        return prescribed_growth_family(
            variant, sigma, omega=omega, gamma=gamma, omega_rho=rho)
    if head in ("explicit", "jacobi"):
        if len(parts) != 1:
            raise ValueError(f"{head} takes exactly one CSV path")
        import os

        path = parts[0]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        col0, col1 = _read_two_columns(path)
        if head == "explicit":
            return new_validated(col0, col1, name=f"explicit({parts[0]})")
        jp = JacobiParameters(a=np.asarray(col0), b=np.asarray(col1))
        return hamiltonian_from_jacobi(jp)
    raise ValueError(f"unknown family constructor {head!r}")


def _read_two_columns(path: str) -> Tuple[np.ndarray, np.ndarray]:
    c0, c1 = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                x, y = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if not c0:  # tolerate one header line
                    continue
                raise ValueError(f"bad row in {path}: {row!r}")
            c0.append(x)
            c1.append(y)
    if not c0:
        raise ValueError(f"no data rows in {path}")
    return np.asarray(c0), np.asarray(c1)
