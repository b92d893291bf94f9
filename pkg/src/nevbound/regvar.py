"""Regularly varying function utilities.

Power-log functions c*t^a*(log t)^b form the closed scale on which every
explicit growth formula in this package lives: products, quotients and
real powers stay in the scale, asymptotic inverses have a closed form,
and Karamata integrals have known asymptotics.  On top of the symbolic
scale this module provides the numeric machinery used by the bound
evaluators:

* ``karamata_integral``  -- head/tail integrals with a controlled
  remainder beyond a quadrature cutoff,
* ``generalized_inverse`` -- the running-sup inverse
  sup({t >= 1 : sup_{1<=s<=t} f(s)/y <= 1} | {1}),
* ``nonincreasing_smoothening`` -- a continuous monotone envelope that
  stays within a bounded ratio of its input,
* ``index_estimate``     -- log-log regression slope on the top half of
  a geometric grid.

All objects are immutable and all functions pure; concurrent use needs
no synchronization.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

__all__ = [
    "PowerLogFunction",
    "ComparisonFunction",
    "power_log",
    "pl_eval",
    "pl_algebra",
    "pl_asymptotic_inverse",
    "karamata_integral",
    "generalized_inverse",
    "nonincreasing_smoothening",
    "index_estimate",
    "escape_time",
    "parse_comparison",
    "DomainError",
    "DivergenceError",
    "InsufficientDataError",
]

_E = math.e


class DomainError(ValueError):
    """Argument outside the declared domain of an operation."""


class DivergenceError(ValueError):
    """An integral declared convergent does not converge."""


class InsufficientDataError(ValueError):
    """Not enough samples (or decades) for a stable estimate."""


# --------------------------------------------------------------------------
# symbolic power-log scale
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerLogFunction:
    """c * t^power * (log t)^logpower on [domain_start, infinity).

    With a log factor present, ``domain_start >= e`` so that log t >= 1
    and negative log-powers cause no sign or singularity trouble; pure
    powers only need a positive start (t = 1 anchoring matters when the
    function doubles as an exact pointwise majorant).  Evaluation
    *below* the domain start through ``__call__`` clamps to the value at
    the start (the asymptotic scale is only meaningful for large t
    anyway); the checked entry point ``pl_eval`` raises instead.
    """

    coefficient: float
    power: float
    logpower: float
    domain_start: float = _E

    def __post_init__(self) -> None:
        if not self.coefficient > 0:
            raise ValueError(f"coefficient must be > 0, got {self.coefficient}")
        if self.logpower != 0.0 and self.domain_start < _E - 1e-12:
            raise ValueError(
                f"domain_start must be >= e with a log factor, "
                f"got {self.domain_start}"
            )
        if not self.domain_start > 0:
            raise ValueError(
                f"domain_start must be positive, got {self.domain_start}"
            )

    # -- evaluation ------------------------------------------------------
    def _raw(self, t):
        logt = np.log(t)
        return self.coefficient * np.power(t, self.power) * np.power(
            logt, self.logpower
        )

    def __call__(self, t):
        t = np.maximum(np.asarray(t, dtype=float), self.domain_start)
        out = self._raw(t)
        return float(out) if out.ndim == 0 else out

    # -- algebra ---------------------------------------------------------
    def __mul__(self, other: "PowerLogFunction") -> "PowerLogFunction":
        return PowerLogFunction(
            self.coefficient * other.coefficient,
            self.power + other.power,
            self.logpower + other.logpower,
            max(self.domain_start, other.domain_start),
        )

    def __truediv__(self, other: "PowerLogFunction") -> "PowerLogFunction":
        return PowerLogFunction(
            self.coefficient / other.coefficient,
            self.power - other.power,
            self.logpower - other.logpower,
            max(self.domain_start, other.domain_start),
        )

    def __pow__(self, r: float) -> "PowerLogFunction":
        return PowerLogFunction(
            self.coefficient ** r,
            self.power * r,
            self.logpower * r,
            self.domain_start,
        )

    @property
    def index(self) -> float:
        """Regular-variation index (the power exponent)."""
        return self.power

    def describe(self) -> str:
        bits = []
        if self.coefficient != 1.0:
            bits.append(f"{self.coefficient:g}")
        if self.power != 0.0:
            bits.append(f"t^{self.power:g}")
        if self.logpower != 0.0:
            bits.append(f"(log t)^{self.logpower:g}")
        return " * ".join(bits) if bits else "1"

    def as_comparison(
        self, monotonicity: Optional[str] = None
    ) -> "ComparisonFunction":
        """Wrap as a total ComparisonFunction on [1, inf) (clamped below
        the domain start, hence constant there)."""
        if monotonicity is None:
            # (log f)'(t) = (a + b/log t)/t; on the clamped domain
            # log t >= 1 the sign is constant iff a and a+b agree
            a, b = self.power, self.logpower
            if a <= 0 and a + min(b, 0.0) <= 0 and a + max(b, 0.0) <= 0:
                monotonicity = "nonincreasing" if (a, b) != (0.0, 0.0) else "none"
            elif a >= 0 and a + min(b, 0.0) >= 0 and a + max(b, 0.0) >= 0:
                monotonicity = "nondecreasing" if (a, b) != (0.0, 0.0) else "none"
            else:
                monotonicity = "none"
        return ComparisonFunction(
            handle=self.__call__,
            declared_index=self.power,
            monotonicity=monotonicity,
            powerlog=self,
            description=self.describe(),
        )


def power_log(
    coefficient: float, power: float, logpower: float = 0.0, domain_start: float = _E
) -> PowerLogFunction:
    return PowerLogFunction(coefficient, power, logpower, domain_start)


def pl_eval(f: PowerLogFunction, t: float) -> float:
    """Checked evaluation: raises DomainError below the domain start."""
    if t < f.domain_start:
        raise DomainError(
            f"t={t} below domain start {f.domain_start} of {f.describe()}"
        )
    return float(f._raw(float(t)))


def pl_algebra(f: PowerLogFunction, g, op) -> PowerLogFunction:
    """Exact exponent arithmetic on the power-log scale.

    op = "multiply" | "divide" with a second PowerLogFunction g, or
    op = "power" with a real exponent passed as g.
    """
    if op == "multiply":
        return f * g
    if op == "divide":
        return f / g
    if op == "power":
        return f ** float(g)
    raise ValueError(f"unknown op {op!r}")


# --------------------------------------------------------------------------
# comparison functions (numeric handles with declared metadata)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonFunction:
    """A total positive function on [1, inf) with declared metadata.

    ``handle`` must accept scalars and numpy arrays.  ``declared_index``
    is the regular-variation index the caller asserts; ``monotonicity``
    is one of "nonincreasing", "nondecreasing", "none".  When the handle
    is (a scaled/capped) power-log, ``powerlog`` keeps the symbolic form
    so integrals and inverses can use exact exponent information.
    """

    handle: Callable
    declared_index: Optional[float] = None
    monotonicity: str = "none"
    powerlog: Optional[PowerLogFunction] = None
    description: str = ""
    # cap value when the function is min(powerlog, cap); None otherwise
    cap: Optional[float] = None

    def __call__(self, t):
        out = np.asarray(self.handle(np.asarray(t, dtype=float)))
        return float(out) if out.ndim == 0 else out

    def scaled(self, alpha: float) -> "ComparisonFunction":
        """alpha * f, alpha > 0 (monotonicity and index preserved)."""
        if not alpha > 0:
            raise ValueError("scale factor must be positive")
        inner = self

        def h(t):
            return alpha * np.asarray(inner.handle(t))

        return ComparisonFunction(
            handle=h,
            declared_index=self.declared_index,
            monotonicity=self.monotonicity,
            powerlog=(
                replace(
                    self.powerlog,
                    coefficient=self.powerlog.coefficient * alpha,
                )
                if self.powerlog is not None and self.cap is None
                else None
            ),
            description=f"{alpha:g} * ({self.description or 'f'})",
            cap=None if self.cap is None else alpha * self.cap,
        )

    def capped(self, alpha: float) -> "ComparisonFunction":
        """min(f, alpha) -- e.g. to enforce d_phi <= 1."""
        if not alpha > 0:
            raise ValueError("cap must be positive")
        inner = self

        def h(t):
            return np.minimum(np.asarray(inner.handle(t), dtype=float), alpha)

        mono = self.monotonicity  # a pointwise cap preserves monotonicity
        return ComparisonFunction(
            handle=h,
            declared_index=self.declared_index,
            monotonicity=mono,
            powerlog=self.powerlog,
            description=f"min({self.description or 'f'}, {alpha:g})",
            cap=alpha,
        )


def comparison_from_callable(
    handle: Callable,
    declared_index: Optional[float] = None,
    monotonicity: str = "none",
    description: str = "",
) -> ComparisonFunction:
    return ComparisonFunction(
        handle=handle,
        declared_index=declared_index,
        monotonicity=monotonicity,
        description=description,
    )


# --------------------------------------------------------------------------
# Karamata integrals
# --------------------------------------------------------------------------

_TAIL_CUTOFF = 1.0e6


def _quad_log_space(f: Callable, lo: float, hi: float) -> float:
    """integral of f over [lo, hi] computed as int f(e^u) e^u du.

    Splitting per ~2 decades keeps scipy's quadrature honest for
    integrands spanning many orders of magnitude.
    """
    if hi <= lo:
        return 0.0
    ulo, uhi = math.log(lo), math.log(hi)
    knots = np.linspace(ulo, uhi, max(2, int(math.ceil((uhi - ulo) / 4.6)) + 1))
    total = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        val, _ = integrate.quad(
            lambda u: float(f(math.exp(u))) * math.exp(u),
            a,
            b,
            limit=200,
            epsabs=0.0,
            epsrel=1e-11,
        )
        total += val
    return total


def _declared_index(f) -> Optional[float]:
    if isinstance(f, PowerLogFunction):
        return f.power
    if isinstance(f, ComparisonFunction):
        if f.powerlog is not None and f.cap is None:
            return f.powerlog.power
        return f.declared_index
    return None


def _as_powerlog(f) -> Optional[PowerLogFunction]:
    if isinstance(f, PowerLogFunction):
        return f
    if isinstance(f, ComparisonFunction) and f.powerlog is not None and f.cap is None:
        return f.powerlog
    return None


def karamata_integral(f, t: float, direction: str) -> float:
    """Head integral over [1, t] or tail integral over [t, inf).

    Heads need index >= -1, tails index <= -1 (with the boundary -1
    requiring genuinely integrable input).  Tails are quadrature up to a
    cutoff plus a controlled remainder:

    * exact power-log input with power < -1: the remainder beyond the
      cutoff is made negligible by pushing the cutoff 60/|power+1|
      log-units out (relative truncation ~ e^-60);
    * exact power-log input with power == -1: elementary closed form in
      u = log s (convergent iff logpower < -1);
    * generic handle: Karamata remainder cutoff*f(cutoff)/(-(index+1))
      at cutoff max(t, 1e6), which is the declared-index estimate of the
      remaining mass.  Index exactly -1 is rejected for generic handles
      (the remainder formula degenerates and slowly decaying tails defeat
      naive quadrature).
    """
    t = float(t)
    if t < 1.0:
        raise DomainError(f"t must be >= 1, got {t}")
    idx = _declared_index(f)
    pl = _as_powerlog(f)
    if direction == "head":
        return _quad_log_space(f, 1.0, t) if t > 1.0 else 0.0
    if direction != "tail":
        raise ValueError(f"direction must be 'head' or 'tail', got {direction!r}")

    # -- tail ------------------------------------------------------------
    if pl is not None:
        a, b, c = pl.power, pl.logpower, pl.coefficient
        t_eff = max(t, pl.domain_start)
        head_flat = 0.0
        if t < pl.domain_start:
            head_flat = (pl.domain_start - t) * pl(pl.domain_start)
        if a < -1.0:
            hi = t_eff * math.exp(60.0 / (-(a + 1.0)))
            return head_flat + _quad_log_space(pl, t_eff, hi)
        if a == -1.0:
            if b < -1.0:
                #  int_t^inf c s^-1 (log s)^b ds = c (log t)^(b+1)/(-(b+1))
                return head_flat + c * math.log(t_eff) ** (b + 1.0) / (-(b + 1.0))
            raise DivergenceError(
                f"tail of {pl.describe()} diverges (index -1, logpower {b} >= -1)"
            )
        raise DivergenceError(
            f"tail of {pl.describe()} diverges (index {a} > -1)"
        )

    if idx is None:
        raise DomainError("tail integral of a handle without a declared index")
    if idx > -1.0:
        raise DivergenceError(f"tail integral with declared index {idx} > -1")
    if idx == -1.0:
        raise DivergenceError(
            "tail at declared index exactly -1 needs an exact power-log input"
        )
    cutoff = max(t, _TAIL_CUTOFF)
    body = _quad_log_space(f, t, cutoff)
    remainder = cutoff * float(f(cutoff)) / (-(idx + 1.0))
    return body + remainder


# --------------------------------------------------------------------------
# generalized inverse (running-sup form)
# --------------------------------------------------------------------------

_GI_TMAX = 1.0e18
_GI_GRID = 48  # sample points per doubling segment for the running sup


def generalized_inverse(f, y: float, t_max: float = _GI_TMAX) -> float:
    """sup({t >= 1 : sup_{1<=s<=t} f(s)/y <= 1} union {1}).

    Returns +inf when the predicate holds on every probed scale up to
    ``t_max`` (doubling search).  The running sup is evaluated on a
    geometric refinement grid per segment, so mild non-monotonicity of f
    is handled; the result is always >= 1 by the union-with-{1}
    convention, which also makes the function total.
    """
    y = float(y)
    if not math.isfinite(y) or y <= 0:
        raise DomainError(f"y must be positive and finite, got {y}")

    def seg_sup(lo: float, hi: float) -> float:
        s = np.exp(np.linspace(math.log(lo), math.log(hi), _GI_GRID))
        vals = np.asarray(f(s), dtype=float)
        return float(np.max(vals))

    run = float(f(1.0))
    if run / y > 1.0:
        return 1.0  # predicate already false at t=1
    lo = 1.0
    hi = 2.0
    while True:
        s = seg_sup(lo, hi)
        if max(run, s) / y > 1.0:
            break
        run = max(run, s)
        if hi >= t_max:
            return math.inf
        lo = hi
        hi = min(hi * hi if hi > 4 else hi * 2, t_max)  # accelerated doubling

    # crossing inside (lo, hi]; running sup restricted there is the sup of
    # f on [lo, .] joined with the constant `run` -- bisect geometrically.
    for _ in range(80):
        mid = math.sqrt(lo * hi)
        if max(run, seg_sup(lo * (1 - 1e-15), mid)) / y > 1.0:
            hi = mid
        else:
            run = max(run, seg_sup(lo, mid))
            lo = mid
        if hi / lo < 1.0 + 1e-14:
            break
    return lo


# --------------------------------------------------------------------------
# nonincreasing smoothening
# --------------------------------------------------------------------------


def nonincreasing_smoothening(
    f: ComparisonFunction, grid_start: float = 1.0, points_per_decade: int = 64
) -> ComparisonFunction:
    """Continuous nonincreasing envelope of an approximately
    nonincreasing function, within a bounded ratio of the input.

    Construction: running infimum over a geometric grid, linear
    interpolation in log t between grid points, lazy extension of the
    grid on demand.  Scaling by a positive constant and capping by
    min(., alpha) of the result remain admissible smoothenings; use
    ``.scaled`` / ``.capped`` on the returned object.
    """
    if f.declared_index is not None and f.declared_index > 0:
        raise DomainError(
            f"declared index {f.declared_index} > 0: not eventually nonincreasing"
        )
    step = 10.0 ** (1.0 / points_per_decade)
    state = {
        "ts": [grid_start],
        "vals": [float(f(grid_start))],
    }

    def extend_to(t: float) -> None:
        ts, vals = state["ts"], state["vals"]
        while ts[-1] < t:
            nxt = ts[-1] * step
            ts.append(nxt)
            vals.append(min(vals[-1], float(f(nxt))))

    def h(t):
        t = np.asarray(t, dtype=float)
        tmax = float(np.max(t)) if t.size else grid_start
        extend_to(max(tmax * step, grid_start))
        ts = np.asarray(state["ts"])
        vals = np.asarray(state["vals"])
        tt = np.clip(t, ts[0], ts[-1])
        out = np.interp(np.log(tt), np.log(ts), vals)
        return out

    return ComparisonFunction(
        handle=h,
        declared_index=f.declared_index,
        monotonicity="nonincreasing",
        description=f"smoothening({f.description or 'f'})",
    )


# --------------------------------------------------------------------------
# index estimation
# --------------------------------------------------------------------------


def index_estimate(samples: Sequence[Tuple[float, float]]) -> float:
    """Least-squares slope of log f against log t over the top half of a
    geometric sample grid (the asymptotic index; small-t samples would
    only bias it)."""
    if len(samples) < 8:
        raise InsufficientDataError(
            f"need >= 8 samples, got {len(samples)}"
        )
    ts = np.asarray([s[0] for s in samples], dtype=float)
    vs = np.asarray([s[1] for s in samples], dtype=float)
    order = np.argsort(ts)
    ts, vs = ts[order], vs[order]
    if ts[-1] / ts[0] < 999.0:
        raise InsufficientDataError(
            f"samples span {math.log10(ts[-1] / ts[0]):.2f} decades, need >= 3"
        )
    half = len(ts) // 2
    x = np.log(ts[half:])
    ylog = np.log(vs[half:])
    slope, _ = np.polyfit(x, ylog, 1)
    return float(slope)


def escape_time(a, R: float, t_cap: float = 1e280,
                points_per_decade: int = 16) -> float:
    """sup of the sub-level set {t >= 1 : max_{1<=s<=t} a(s) <= R}.

    For slowly varying a this escape time eventually outgrows every
    power of R (the sub-level set swallows any t <= R^rho once R is
    large enough that a(r) <= r^(1/rho) on the tail).  Scans a
    geometric grid tracking the running maximum, bisecting the cell
    where the level is first exceeded (the bisection pins the first
    crossing exactly when a is monotone across that one cell, which
    holds for the monotone slowly varying functions this is meant
    for); returns t_cap when a stays below R over the whole probe
    range."""
    if not (R > 0) or not math.isfinite(R):
        raise DomainError(f"level R must be positive and finite, got {R}")
    if float(a(1.0)) > R:
        return 1.0
    n = max(2, int(math.log10(t_cap) * points_per_decade))
    ts = np.exp(np.linspace(0.0, math.log(t_cap), n))
    vals = np.asarray([float(a(t)) for t in ts])
    running = np.maximum.accumulate(vals)
    above = np.nonzero(running > R)[0]
    if len(above) == 0:
        return t_cap
    i = int(above[0])
    if i == 0:
        return 1.0
    lo, hi = ts[i - 1], ts[i]
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        if float(a(mid)) <= R:
            lo = mid
        else:
            hi = mid
    return lo


# --------------------------------------------------------------------------
# asymptotic inverse
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticInverse:
    """Asymptotic inverse of a power-log function with positive index.

    ``expression`` is the closed form rho^(b/rho) * (t / (log t)^b)^(1/rho)
    for a = c t^rho (log t)^b (exact for b = 0).  Because the closed form
    approaches the true preimage only at the leisurely rate
    1 - b^2 loglog t / log t, evaluation polishes it with a few
    multiplicative fixed-point corrections t <- t*(x/a(t))^(1/rho), each
    of which contracts the log-error by ~ loglog x/log x; the result is
    the same asymptotic-equivalence class with composition accurate to
    well under a percent on any practical range.
    """

    source: PowerLogFunction
    expression: PowerLogFunction
    polish_steps: int = 4

    def closed_form(self, x):
        return self.expression(x)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        rho = self.source.power
        t = np.maximum(self.expression(x), self.source.domain_start)
        for _ in range(self.polish_steps):
            t = t * (x / self.source(t)) ** (1.0 / rho)
            t = np.maximum(t, self.source.domain_start)
        return float(t) if t.ndim == 0 else t


def pl_asymptotic_inverse(f: PowerLogFunction) -> AsymptoticInverse:
    """Asymptotic inverse on the power-log scale (index must be > 0).

    For a(t) = c t^rho (log t)^b the returned closed form is

        a^-(x) = rho^(b/rho) * c^(-1/rho) * x^(1/rho) * (log x)^(-b/rho),

    i.e. the index is 1/rho and composition a(a^-(x))/x -> 1.
    """
    rho = f.power
    if rho <= 0:
        raise DomainError(
            f"index {rho} <= 0: not invertible in the asymptotic sense"
        )
    b = f.logpower
    coeff = (rho ** (b / rho)) * (f.coefficient ** (-1.0 / rho))
    expr = PowerLogFunction(coeff, 1.0 / rho, -b / rho)
    return AsymptoticInverse(source=f, expression=expr)


# --------------------------------------------------------------------------
# expression grammar for config files
# --------------------------------------------------------------------------

_CALL_RE = re.compile(r"^\s*([a-zA-Z_][a-zA-Z0-9_]*)\s*\((.*)\)\s*$", re.S)


def _split_args(body: str) -> list:
    """Split a call body on top-level commas."""
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    last = "".join(cur).strip()
    if last:
        parts.append(last)
    return [p.strip() for p in parts]


def _load_table(path: Path) -> ComparisonFunction:
    ts, vs = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() in ("t", "#"):
                continue
            ts.append(float(row[0]))
            vs.append(float(row[1]))
    ts_a = np.asarray(ts)
    vs_a = np.asarray(vs)
    if len(ts_a) < 2 or np.any(np.diff(ts_a) <= 0):
        raise ValueError(f"{path}: need >= 2 rows with strictly increasing t")
    if np.any(vs_a <= 0):
        raise ValueError(f"{path}: values must be positive")
    lt, lv = np.log(ts_a), np.log(vs_a)
    right_slope = (lv[-1] - lv[max(0, len(lv) // 2)]) / (
        lt[-1] - lt[max(0, len(lt) // 2)]
    )

    def h(t):
        t = np.asarray(t, dtype=float)
        out = np.interp(np.log(np.clip(t, ts_a[0], ts_a[-1])), lt, lv)
        # extend beyond the right end with the fitted power law
        beyond = t > ts_a[-1]
        out = np.where(beyond, lv[-1] + right_slope * (np.log(t) - lt[-1]), out)
        return np.exp(out)

    diffs = np.diff(vs_a)
    mono = (
        "nonincreasing"
        if np.all(diffs <= 0)
        else "nondecreasing" if np.all(diffs >= 0) else "none"
    )
    half = len(ts_a) // 2
    idx = index_estimate(list(zip(ts_a, vs_a))) if (
        len(ts_a) >= 8 and ts_a[-1] / ts_a[0] >= 999
    ) else float(right_slope)
    return ComparisonFunction(
        handle=h,
        declared_index=idx,
        monotonicity=mono,
        description=f"tabulated({path.name})",
    )


def parse_comparison(expr: str, base_dir: Optional[Path] = None) -> ComparisonFunction:
    """Parse the comparison-function grammar used in config files.

        powerlog(c, a, b)     c * t^a * (log t)^b
        tabulated(path.csv)   log-log interpolation of a two-column table
        scaled(expr, alpha)   alpha * expr
        min(expr, alpha)      pointwise cap
    """
    m = _CALL_RE.match(expr)
    if not m:
        raise ValueError(f"cannot parse comparison expression: {expr!r}")
    name, body = m.group(1).lower(), m.group(2)
    args = _split_args(body)
    if name == "powerlog":
        if len(args) != 3:
            raise ValueError(f"powerlog needs 3 arguments, got {len(args)}")
        c, a, b = (float(x) for x in args)
        return power_log(c, a, b).as_comparison()
    if name == "tabulated":
        if len(args) != 1:
            raise ValueError("tabulated needs exactly one path argument")
        p = Path(args[0])
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        return _load_table(p)
    if name == "scaled":
        if len(args) != 2:
            raise ValueError("scaled needs (expr, alpha)")
        return parse_comparison(args[0], base_dir).scaled(float(args[1]))
    if name == "min":
        if len(args) != 2:
            raise ValueError("min needs (expr, alpha)")
        return parse_comparison(args[0], base_dir).capped(float(args[1]))
    raise ValueError(f"unknown comparison constructor {name!r}")
