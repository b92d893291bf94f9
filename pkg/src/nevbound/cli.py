"""Command-line front end: growth measurements, bound checks, presets.

Subcommands
-----------
    run <config.toml>    execute the checks requested in a config file
    measure <family>     log-max growth of one family over a radius grid
    bound <family> [d]   closed-form case + upper bound table for a family
    presets              catalog of built-in preset tokens
    selftest             run the packaged acceptance suite via pytest

Exit codes: 0 all requested verdicts pass, 1 at least one verdict fails,
2 config/parse/validation error, 3 numeric cap hit or the upper bound is
trivial (>~ R) because the comparison weights do not decay.

The worker pool for per-radius evaluations is capped by the
NEVBOUND_THREADS environment variable (default: min(4, cpu count)).
All numbers in config files may be given as the literal string "inf".
"""

from __future__ import annotations

import argparse
import csv as _csv
import json
import math
import os
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

try:
    import tomllib  # python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - environment dependent
    import tomli as tomllib

from . import bounds, casebook, hamiltonian, monodromy, regvar

__all__ = [
    "ExperimentConfig",
    "ConfigError",
    "load_config",
    "run_experiment",
    "preset_catalog",
    "main",
    "EXIT_OK",
    "EXIT_CHECK_FAILED",
    "EXIT_CONFIG",
    "EXIT_NUMERIC",
]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

KNOWN_CHECKS = ("measure", "upper", "lower", "sandwich", "case", "b38")

MEASURE_COLUMNS = ["R", "logM", "N_trunc", "trunc_eps", "K_angles"]
BAND_COLUMNS = ["R", "logM", "ratio"]


class ConfigError(ValueError):
    """Config file malformed, inconsistent, or incomplete."""


class TrivialBound(RuntimeError):
    """The upper bound is trivial (>~ R) on the whole requested grid."""


def _workers() -> int:
    env = os.environ.get("NEVBOUND_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"NEVBOUND_THREADS={env!r} is not an integer")
        if n < 1:
            raise ConfigError("NEVBOUND_THREADS must be >= 1")
        return n
    return min(4, os.cpu_count() or 1)


def _num(x, name: str) -> float:
    """Accept int/float or the strings 'inf' / '-inf'."""
    if isinstance(x, bool):
        raise ConfigError(f"{name}: expected a number, got a boolean")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return math.inf
        if s in ("-inf", "-infinity"):
            return -math.inf
        try:
            return float(x)
        except ValueError:
            pass
    raise ConfigError(f"{name}: expected a number, got {x!r}")


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    seed: int = 0
    family: str = ""
    # comparison-data expressions (regvar grammar); all four or none
    d_l: Optional[str] = None
    d_phi: Optional[str] = None
    c_l: Optional[str] = None
    c_phi: Optional[str] = None
    psi: object = 0.0              # float or the string "auto"
    r_min: float = 1e2
    r_max: float = 1e5
    points_per_decade: int = 8
    eps: float = 1e-3
    angles: int = 0                # 0 = adaptive doubling
    checks: List[str] = field(default_factory=lambda: ["measure"])
    csv_out: Optional[Path] = None
    json_out: Optional[Path] = None
    base_dir: Path = field(default_factory=Path.cwd)

    def validate(self) -> None:
        if not self.family:
            raise ConfigError("family spec is required ([family] spec = ...)")
        if not (self.r_min < self.r_max):
            raise ConfigError(
                f"need r_min < r_max, got {self.r_min} >= {self.r_max}")
        if self.r_min <= 0:
            raise ConfigError("r_min must be positive")
        if self.points_per_decade < 4:
            raise ConfigError(
                f"points_per_decade must be >= 4, got {self.points_per_decade}")
        if not (self.eps > 0):
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if self.angles < 0:
            raise ConfigError("angles must be >= 0 (0 = adaptive)")
        if not self.checks:
            raise ConfigError("at least one check must be requested")
        for c in self.checks:
            if c not in KNOWN_CHECKS:
                raise ConfigError(
                    f"unknown check {c!r}; valid: {', '.join(KNOWN_CHECKS)}")
        exprs = [self.d_l, self.d_phi, self.c_l, self.c_phi]
        if any(e is not None for e in exprs) and any(e is None for e in exprs):
            raise ConfigError(
                "comparison data needs all four of d_l, d_phi, c_l, c_phi")
        if isinstance(self.psi, str) and self.psi != "auto":
            raise ConfigError(f"psi must be a number or 'auto', got {self.psi!r}")

    def radii(self) -> np.ndarray:
        decades = math.log10(self.r_max / self.r_min)
        n = max(2, int(round(self.points_per_decade * decades)) + 1)
        return np.geomspace(self.r_min, self.r_max, n)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config {path} is not valid TOML: {exc}")

    cfg = ExperimentConfig(base_dir=path.resolve().parent)
    exp = doc.get("experiment", {})
    cfg.name = str(exp.get("name", cfg.name))
    cfg.seed = int(exp.get("seed", cfg.seed))

    fam = doc.get("family", {})
    cfg.family = str(fam.get("spec", ""))

    data = doc.get("data", {})
    for key in ("d_l", "d_phi", "c_l", "c_phi"):
        if key in data:
            setattr(cfg, key, str(data[key]))
    if "psi" in data:
        cfg.psi = data["psi"] if data["psi"] == "auto" else _num(
            data["psi"], "data.psi")

    grid = doc.get("grid", {})
    cfg.r_min = _num(grid.get("r_min", cfg.r_min), "grid.r_min")
    cfg.r_max = _num(grid.get("r_max", cfg.r_max), "grid.r_max")
    cfg.points_per_decade = int(
        grid.get("points_per_decade", cfg.points_per_decade))

    trunc = doc.get("truncation", {})
    cfg.eps = _num(trunc.get("eps", cfg.eps), "truncation.eps")

    circ = doc.get("circle", {})
    cfg.angles = int(circ.get("angles", cfg.angles))

    checks = doc.get("checks", {})
    if "run" in checks:
        if not isinstance(checks["run"], list):
            raise ConfigError("[checks] run must be a list of check names")
        cfg.checks = [str(c) for c in checks["run"]]

    out = doc.get("output", {})
    if "csv" in out:
        cfg.csv_out = cfg.base_dir / str(out["csv"])
    if "json" in out:
        cfg.json_out = cfg.base_dir / str(out["json"])

    cfg.validate()
    return cfg


# --------------------------------------------------------------------------
# family / data resolution
# --------------------------------------------------------------------------


def _resolve_family(spec: str, base_dir: Path):
    """Family grammar, plus 'preset:<token>(...)' for the Jacobi presets."""
    s = spec.strip()
    if s.startswith("preset:"):
        body = s[len("preset:"):].strip()
        name, _, arglist = body.partition("(")
        name = name.strip()
        kwargs = {}
        if arglist:
            arglist = arglist.rstrip(")").strip()
            for part in filter(None, (p.strip() for p in arglist.split(","))):
                if "=" not in part:
                    raise ConfigError(
                        f"preset arguments must be key=value, got {part!r}")
                k, v = part.split("=", 1)
                kwargs[k.strip()] = _num(v.strip(), f"preset {k.strip()}")
        if name in ("b79", "b83"):
            # b83 takes a variant token as its first casebook parameter
            if name == "b83" and "variant" not in kwargs:
                kwargs["variant"] = "rotation"
            bundle = casebook.jacobi_presets(name, **kwargs)
            return bundle.hamiltonian
        raise ConfigError(
            f"preset {name!r} does not define a Hamiltonian family; "
            "see 'nevbound presets' for what each token provides")
    return hamiltonian.family_from_string(s, base_dir=str(base_dir))


def _resolve_data(cfg: ExperimentConfig, H) -> Optional[bounds.ComparisonData]:
    if cfg.d_l is None:
        return getattr(H, "comparison", None)
    funcs = {}
    for key in ("d_l", "d_phi", "c_l", "c_phi"):
        funcs[key] = regvar.parse_comparison(getattr(cfg, key), cfg.base_dir)
    if cfg.psi == "auto":
        N = min(H.n_available, 4096)
        psi = bounds.auto_psi(H, N)
    else:
        psi = float(cfg.psi)
    data = bounds.ComparisonData(psi=psi, **funcs)
    data.validate(t_max=1e8)
    return data


def _needs_data(checks: Sequence[str]) -> bool:
    return any(c in checks for c in ("upper", "lower", "sandwich", "case", "b38"))


# --------------------------------------------------------------------------
# the individual checks
# --------------------------------------------------------------------------


def _check_measure(cfg, H, data, radii):
    c_l = data.c_l if data is not None else None
    c_phi = data.c_phi if data is not None else None
    prof = monodromy.growth_profile(H, radii, eps=cfg.eps, c_l=c_l, c_phi=c_phi)
    ok = bool(np.all(np.isfinite(prof.log_max)))
    summary = {
        "order_estimate": prof.order_estimate,
        "classification": prof.classification,
        "notes": prof.notes,
        "max_logM": float(np.max(prof.log_max)),
    }
    rows = [
        {"R": repr(float(R)), "logM": repr(float(v)), "N_trunc": str(N),
         "trunc_eps": repr(cfg.eps), "K_angles": str(K)}
        for R, v, N, K in zip(prof.radii, prof.log_max, prof.truncations,
                              prof.angle_counts)
    ]
    return ok, summary, {"measure_rows": rows, "profile": prof}


def _check_upper(cfg, H, data, radii):
    # pre-probe: if the tail weights are essentially flat, the R*C side
    # never drops below the integrated density and the bound is >~ 9R
    t0 = max(getattr(data.c_l, "domain_start", 1.0),
             getattr(data.c_phi, "domain_start", 1.0), 1.0)
    s0 = math.sqrt(float(data.c_l(t0)) * float(data.c_phi(t0)))
    s1 = math.sqrt(float(data.c_l(1e8)) * float(data.c_phi(1e8)))
    if s1 > 0.5 * s0:
        raise TrivialBound(
            "bound trivial ≳ R: the tail weights sqrt(c_l c_phi) do "
            f"not decay (dropped only {s0 / max(s1, 1e-300):.3g}x over 8 "
            "decades), so the upper bound cannot improve on exp(const R)")

    def one(R):
        return bounds.upper_bound_report(data, float(R), mode="grid_infimum")

    with ThreadPoolExecutor(max_workers=_workers()) as ex:
        reports = list(ex.map(one, radii))
    if all(r.trivial for r in reports):
        raise TrivialBound(
            "bound trivial ≳ R on the whole grid: the comparison "
            "weights c_l * c_phi do not decay, so the upper bound never "
            "improves on the norm-product estimate")
    ok = all(math.isfinite(r.B_upper) for r in reports)
    top = reports[-1]
    summary = {
        "B_upper_at_rmax": top.B_upper,
        "core_B_at_rmax": top.core_B,
        "trivial_radii": sum(r.trivial for r in reports),
    }
    return ok, summary, {"reports": reports}


def _check_lower(cfg, H, data, radii):
    vals = [bounds.lower_bound(data.d_l, data.d_phi, float(R)) for R in radii]
    ok = all(math.isfinite(v) and v > 0 for v in vals)
    summary = {"lower_Dinv_at_rmax": vals[-1]}
    return ok, summary, {"lower": vals}


def _check_sandwich(cfg, H, data, radii):
    reports = bounds.verify_bound_sandwich(
        H, data, radii, eps=cfg.eps, lower_data=(data.d_l, data.d_phi))
    margins = [r.margin_upper for r in reports]
    ok = all(m is not None and m >= -cfg.eps for m in margins)
    summary = {
        "min_margin_upper": min(margins),
        "margin_lower_ratio_at_rmax": reports[-1].margin_lower_ratio,
    }
    return ok, summary, {"reports": reports}


def _check_case(cfg, H, data, radii):
    diag = casebook.growth_bound_dispatch(data)
    ok = not diag.label.startswith("exceptional")
    summary = {
        "label": diag.label,
        "index": None if diag.index is None else str(diag.index),
        "order_bound": diag.order_bound,
        "two_sided": diag.two_sided,
        "flags": diag.flags,
        "notes": diag.notes,
    }
    return ok, summary, {"diagnosis": diag}


def _check_b38(cfg, H, data, radii):
    band = casebook.two_sided_band_check(
        H, data.d_l, data.d_phi, radii, eps=cfg.eps)
    spread = band.band_spread
    ok = math.isfinite(spread) and spread <= 10.0
    summary = {
        "band": [band.band[0], band.band[1]],
        "band_spread": spread,
        "order_estimate": band.order_estimate,
        "delta": band.delta,
        "notes": band.notes,
    }
    rows = [
        {"R": repr(float(R)), "logM": repr(float(v)), "ratio": repr(float(q))}
        for R, v, q in zip(band.radii, band.log_max, band.ratios)
    ]
    return ok, summary, {"band_rows": rows, "band": band}


_CHECKS = {
    "measure": _check_measure,
    "upper": _check_upper,
    "lower": _check_lower,
    "sandwich": _check_sandwich,
    "case": _check_case,
    "b38": _check_b38,
}


# --------------------------------------------------------------------------
# run: the config-driven driver
# --------------------------------------------------------------------------


def _write_dict_csv(path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = _csv.DictWriter(fh, fieldnames=columns)
        w.writeheader()
        for row in rows:
            w.writerow(row)


def _merge_bound_rows(results: Dict[str, dict], radii) -> List[bounds.BoundReport]:
    """One BoundReport per radius, merged across whichever of the
    upper/lower/sandwich/measure checks actually ran."""
    if "sandwich" in results:
        return results["sandwich"]["reports"]
    if "upper" in results:
        reports = results["upper"]["reports"]
    else:
        reports = [
            bounds.BoundReport(R=float(R), kR=math.nan, hR=math.nan,
                               TR=math.nan, g_at_T=math.nan, RC_at_T=math.nan,
                               L_at_T=math.nan, B_upper=math.nan,
                               core_B=math.nan, t_best=math.nan)
            for R in radii
        ]
    if "lower" in results:
        for r, v in zip(reports, results["lower"]["lower"]):
            r.lower_Dinv = v
    if "measure" in results:
        prof = results["measure"]["profile"]
        for r, v in zip(reports, prof.log_max):
            r.logM = float(v)
            if math.isfinite(r.B_upper):
                r.margin_upper = r.B_upper - r.logM
    return reports


def run_experiment(cfg: ExperimentConfig) -> int:
    """Execute a validated config; prints one verdict line per check."""
    H = _resolve_family(cfg.family, cfg.base_dir)
    data = _resolve_data(cfg, H)
    if data is None and _needs_data(cfg.checks):
        raise ConfigError(
            f"checks {cfg.checks} need comparison data, but the family "
            f"{cfg.family!r} carries none and [data] is empty")
    radii = cfg.radii()

    results: Dict[str, dict] = {}
    verdicts: Dict[str, bool] = {}
    for name in cfg.checks:
        ok, summary, extra = _CHECKS[name](cfg, H, data, radii)
        verdicts[name] = bool(ok)
        results[name] = {"summary": summary, **extra}
        print(f"{'PASS' if ok else 'FAIL'} check={name} "
              + json.dumps(summary, default=_json_default))

    # CSV artifact: the bound schema when any bound check ran, otherwise
    # the measurement schema, otherwise the band schema.
    if cfg.csv_out is not None:
        if any(c in results for c in ("upper", "lower", "sandwich")):
            bounds.bound_reports_to_csv(
                _merge_bound_rows(results, radii), cfg.csv_out)
        elif "measure" in results:
            _write_dict_csv(cfg.csv_out, MEASURE_COLUMNS,
                            results["measure"]["measure_rows"])
        elif "b38" in results:
            _write_dict_csv(cfg.csv_out, BAND_COLUMNS,
                            results["b38"]["band_rows"])

    if cfg.json_out is not None:
        doc = {
            "name": cfg.name,
            "seed": cfg.seed,
            "family": cfg.family,
            "checks": {k: {"verdict": verdicts[k], **results[k]["summary"]}
                       for k in cfg.checks},
            "radii": [float(r) for r in radii],
            "eps": cfg.eps,
            "all_pass": all(verdicts.values()),
        }
        with open(cfg.json_out, "w") as fh:
            json.dump(doc, fh, indent=2, default=_json_default)

    return EXIT_OK if all(verdicts.values()) else EXIT_CHECK_FAILED


def _json_default(obj):
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


# --------------------------------------------------------------------------
# presets
# --------------------------------------------------------------------------


def preset_catalog() -> List[tuple]:
    """(token, signature, description), sorted by token."""
    entries = [
        ("b66", "pure_power_case(delta_l, delta_phi, gamma_l, gamma_phi)",
         "six-row closed-form growth table for pure power data"),
        ("b9", "core_bound_dispatch(d_l, d_phi, c_l, c_phi)",
         "four-branch closed form for the core bound"),
        ("b7", "growth_bound_dispatch(data)",
         "case dispatch stated directly for the measured growth"),
        ("b96", "summable_weights_bound(d_l, d_phi, psi_condition=False)",
         "growth bounds from length decay alone"),
        ("b38", "two_sided_band_check(H, d_l, d_phi, radii, eps=1e-3)",
         "measured log-max against the two-sided k(R) band (needs delta > 2)"),
        ("ex-b24", "exceptional_fixtures('ex-b24')",
         "boundary fixtures: separated core/full bounds"),
        ("ex-b36", "exceptional_fixtures('ex-b36')",
         "boundary fixtures on the (2, 0) exceptional line"),
        ("ex-b11", "exceptional_fixtures('ex-b11')",
         "boundary fixtures: generic no-case data"),
        ("b79", "jacobi_presets('b79', sigma=3.0, n_terms=4000, ...)",
         "critical second-order Jacobi coefficients, order 1/3"),
        ("b83", "jacobi_presets('b83', variant='rotation', omega=0.0, sigma=3.0)",
         "prescribed-growth Jacobi families (rotation/minus2/plus2/sequence)"),
    ]
    return sorted(entries, key=lambda e: e[0])


def _cmd_presets(args) -> int:
    for token, sig, desc in preset_catalog():
        print(f"{token:8s} {sig}")
        print(f"{'':8s}   {desc}")
    return EXIT_OK


# --------------------------------------------------------------------------
# measure / bound one-shot subcommands
# --------------------------------------------------------------------------


def _cmd_measure(args) -> int:
    cfg = ExperimentConfig(
        family=args.family, r_min=_num(args.rmin, "--rmin"),
        r_max=_num(args.rmax, "--rmax"), points_per_decade=args.ppd,
        eps=args.eps, checks=["measure"], base_dir=Path.cwd())
    cfg.validate()
    H = _resolve_family(cfg.family, cfg.base_dir)
    data = _resolve_data(cfg, H)
    ok, summary, extra = _check_measure(cfg, H, data, cfg.radii())
    rows = extra["measure_rows"]
    if args.out:
        _write_dict_csv(args.out, MEASURE_COLUMNS, rows)
    else:
        w = _csv.DictWriter(sys.stdout, fieldnames=MEASURE_COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow(row)
    print(f"{'PASS' if ok else 'FAIL'} check=measure "
          + json.dumps(summary, default=_json_default), file=sys.stderr)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _load_data_file(path: str, H) -> bounds.ComparisonData:
    if path == "attached":
        data = getattr(H, "comparison", None)
        if data is None:
            raise ConfigError(
                "this family carries no attached comparison data; pass a "
                "TOML data file with d_l, d_phi, c_l, c_phi expressions")
        return data
    p = Path(path)
    try:
        with open(p, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read data file {p}: {exc}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"data file {p} is not valid TOML: {exc}")
    table = doc.get("data", doc)
    funcs = {}
    for key in ("d_l", "d_phi", "c_l", "c_phi"):
        if key not in table:
            raise ConfigError(f"data file {p} is missing {key!r}")
        funcs[key] = regvar.parse_comparison(str(table[key]), p.resolve().parent)
    psi = table.get("psi", 0.0)
    if psi == "auto":
        psi = bounds.auto_psi(H, min(H.n_available, 4096))
    data = bounds.ComparisonData(psi=float(psi), **funcs)
    data.validate(t_max=1e8)
    return data


def _cmd_bound(args) -> int:
    cfg = ExperimentConfig(
        family=args.family, r_min=_num(args.rmin, "--rmin"),
        r_max=_num(args.rmax, "--rmax"), points_per_decade=args.ppd,
        eps=args.eps, checks=["upper", "case"], base_dir=Path.cwd())
    cfg.validate()
    H = _resolve_family(cfg.family, cfg.base_dir)
    data = _load_data_file(args.data, H)
    radii = cfg.radii()

    ok_c, summary_c, _ = _check_case(cfg, H, data, radii)
    print(f"{'PASS' if ok_c else 'FAIL'} check=case "
          + json.dumps(summary_c, default=_json_default))
    ok_u, summary_u, extra = _check_upper(cfg, H, data, radii)
    print(f"{'PASS' if ok_u else 'FAIL'} check=upper "
          + json.dumps(summary_u, default=_json_default))
    if args.out:
        bounds.bound_reports_to_csv(extra["reports"], args.out)
    else:
        w = _csv.DictWriter(sys.stdout, fieldnames=bounds._CSV_COLUMNS)
        w.writeheader()
        for r in extra["reports"]:
            w.writerow(r.csv_fields())
    return EXIT_OK if (ok_c and ok_u) else EXIT_CHECK_FAILED


# --------------------------------------------------------------------------
# selftest
# --------------------------------------------------------------------------


def _cmd_selftest(args) -> int:
    here = Path(__file__).resolve()
    for root in (here.parents[2], here.parents[1]):
        candidate = root / "tests" / "test_acceptance.py"
        if candidate.exists():
            break
    else:
        print("selftest: cannot locate tests/test_acceptance.py relative to "
              f"{here}; run pytest from a source checkout instead",
              file=sys.stderr)
        return EXIT_CONFIG
    cmd = [sys.executable, "-m", "pytest", "-q", "-s", str(candidate)]
    proc = subprocess.run(cmd)
    return EXIT_OK if proc.returncode == 0 else EXIT_CHECK_FAILED


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    return run_experiment(cfg)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nevbound",
        description="growth measurements and growth bounds for Hamburger "
                    "Hamiltonians in limit circle case")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="execute a TOML experiment config")
    pr.add_argument("config", help="path to config file")
    pr.set_defaults(func=_cmd_run)

    pp = sub.add_parser("presets", help="list built-in preset tokens")
    pp.set_defaults(func=_cmd_presets)

    pm = sub.add_parser("measure", help="measure log-max growth on a circle "
                                        "radius grid")
    pm.add_argument("family", help="family spec, e.g. 'example_b6(3, 1)'")
    pm.add_argument("--rmin", default=1e2, help="smallest radius")
    pm.add_argument("--rmax", default=1e5, help="largest radius")
    pm.add_argument("--ppd", type=int, default=8, help="points per decade")
    pm.add_argument("--eps", type=float, default=1e-3,
                    help="truncation tolerance")
    pm.add_argument("--out", default=None, help="CSV output path "
                                                "(default: stdout)")
    pm.set_defaults(func=_cmd_measure)

    pb = sub.add_parser("bound", help="case dispatch + upper bound table")
    pb.add_argument("family", help="family spec")
    pb.add_argument("data", nargs="?", default="attached",
                    help="TOML file with d_l/d_phi/c_l/c_phi expressions, "
                         "or 'attached' (default) for the family's own data")
    pb.add_argument("--rmin", default=1e2)
    pb.add_argument("--rmax", default=1e5)
    pb.add_argument("--ppd", type=int, default=8)
    pb.add_argument("--eps", type=float, default=1e-3)
    pb.add_argument("--out", default=None, help="CSV output path")
    pb.set_defaults(func=_cmd_bound)

    ps = sub.add_parser("selftest", help="run the acceptance suite")
    ps.set_defaults(func=_cmd_selftest)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize anything else
        return EXIT_CONFIG if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TrivialBound as exc:
        print(f"numeric: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (bounds.CapError, OverflowError) as exc:
        print(f"numeric cap: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError) as exc:
        # DomainError / DivergenceError / data-contract violations land
        # here too: they mean the inputs, not the numerics, were bad
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main(sys.argv[1:]))
