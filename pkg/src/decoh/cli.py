"""Command-line front end.

Subcommands: error, entangle, sweep, verify, thermal.  Exit codes: 0 on
success, 1 when a verification check fails, 2 for usage or domain errors.
Output is human-readable text by default; --format csv or json switches to
machine-readable forms with 12 significant digits.  A plain key=value
config file can seed any flag; explicit flags win.  DECOH_NUM_THREADS caps
sweep parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import entanglement as ent
from . import error_bounds as eb
from . import thermal as th
from .checks import CHECK_NAMES, run_verification
from .kinematics import (
    CollisionParams,
    collision_params,
    collision_params_from_delta,
    initial_state,
    post_collision_state,
)

SWEEP_PARAMETERS = ("lambda", "k_sigma", "delta", "w", "T")


def _sig12(value):
    """Round floats to 12 significant digits; map non-finite to None."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(f"{value:.12g}")
    return value


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    return _sig12(obj)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def format_json(params: dict, results: dict, checks: list[dict]) -> str:
    doc = {"params": _jsonify(params), "results": _jsonify(results),
           "checks": _jsonify(checks)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def format_csv(params: dict, header: list[str], rows: list[list]) -> str:
    lines = [f"# version={__version__}"]
    for key in sorted(params):
        lines.append(f"# {key}={params[key]}")
    lines.append(",".join(header))
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, float):
                cells.append(f"{v:.12g}")
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def parse_emitted_csv(text: str):
    """Split an emitted CSV back into (comment lines, header, string rows)."""
    comments, header, rows = [], None, []
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line)
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(line.split(","))
    return comments, header, rows


def reemit_csv(comments: list[str], header: list[str], rows: list[list[str]]) -> str:
    lines = list(comments)
    lines.append(",".join(header))
    for row in rows:
        out = []
        for cell in row:
            try:
                out.append(f"{float(cell):.12g}")
            except ValueError:
                out.append(cell)
        lines.append(",".join(out))
    return "\n".join(lines) + "\n"


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line is not key=value: {raw.strip()!r}")
            key, val = line.split("=", 1)
            values[key.strip()] = val.strip()
    return values


_CONFIG_TYPES = {
    "m": float, "M": float, "sigma": float, "Sigma": str, "k": float,
    "lambda": float, "ksigma": float, "delta": float, "grid": int,
    "format": str, "out": str, "parameter": str, "start": float,
    "stop": float, "points": int, "scale": str, "mu_kg": float, "T": float,
    "collisions": int, "F0": float, "n_spectrum": int,
}


def _apply_config(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    overrides = _load_config(args.config)
    for key, raw in overrides.items():
        norm = key.replace("-", "_")
        if norm not in _CONFIG_TYPES:
            raise ValueError(f"unknown config key {key!r}")
        attr = "lambda_" if norm == "lambda" else norm  # argparse dest for --lambda
        if getattr(args, attr, None) is None:
            setattr(args, attr, _CONFIG_TYPES[norm](raw))


def _build_params(args) -> CollisionParams:
    if getattr(args, "delta", None) is not None:
        if getattr(args, "m", None) is not None or getattr(args, "M", None) is not None:
            raise ValueError("give either --delta or --m/--M, not both")
        return collision_params_from_delta(args.delta)
    if getattr(args, "m", None) is None or getattr(args, "M", None) is None:
        raise ValueError("masses are required: --m and --M (or --delta)")
    return collision_params(args.m, args.M)


def _resolve_spreads(args, p: CollisionParams):
    """(Sigma, sigma) from flags; --Sigma auto applies spread matching."""
    sigma = args.sigma if getattr(args, "sigma", None) is not None else 1.0
    Sigma_raw = getattr(args, "Sigma", None)
    if Sigma_raw is None:
        return None, sigma
    if isinstance(Sigma_raw, str) and Sigma_raw.strip().lower() == "auto":
        return ent.optimal_spreads(sigma, p), sigma
    return float(Sigma_raw), sigma


def _resolve_lambda_ksigma(args, p: CollisionParams):
    Sigma, sigma = _resolve_spreads(args, p)
    if getattr(args, "lambda_", None) is not None:
        lam = args.lambda_
    elif Sigma is not None:
        lam = (Sigma / sigma) ** 2
    else:
        lam = None
    if getattr(args, "ksigma", None) is not None:
        k_sigma = args.ksigma
    elif getattr(args, "k", None) is not None:
        k_sigma = abs(args.k) * sigma
    else:
        k_sigma = 0.0
    return lam, k_sigma


def cmd_error(args) -> int:
    _apply_config(args)
    p = _build_params(args)
    lam, k_sigma = _resolve_lambda_ksigma(args, p)
    opt = eb.optimal_lambda(k_sigma, p)
    if lam is None:
        lam = opt.lambda_max
    rep = eb.error_report(lam, k_sigma, p)
    params = {"delta": p.delta, "gamma": p.gamma, "lambda": rep.lam,
              "k_sigma": rep.k_sigma}
    results = {"A": rep.A, "one_minus_A": rep.one_minus_A,
               "lambda": rep.lam, "lambda_max": rep.lambda_max,
               "A_max": rep.A_max, "one_minus_A_max": opt.one_minus_A,
               "regime": rep.regime}
    if getattr(args, "grid", None):
        # cross-check the closed form on a quadrature grid of the given size
        from .kinematics import ideal_reflected_state
        from .oracles import grid_for_state, quadrature_overlap

        sigma = args.sigma if args.sigma is not None else 1.0
        s0 = initial_state(sigma * math.sqrt(rep.lam), sigma,
                           rep.k_sigma / sigma)
        sf = post_collision_state(s0, p)
        quad = quadrature_overlap(
            ideal_reflected_state(s0), sf,
            grid=grid_for_state(sf, force_n=args.grid),
        )
        results["A_quadrature"] = abs(quad.value)
        results["A_quadrature_deviation"] = abs(abs(quad.value) - rep.A)
    if args.format == "json":
        _emit(format_json(params, results, []), args.out)
    elif args.format == "csv":
        header = ["lambda", "k_sigma", "A", "one_minus_A", "lambda_max", "A_max", "regime"]
        row = [rep.lam, rep.k_sigma, rep.A, rep.one_minus_A, rep.lambda_max,
               rep.A_max, rep.regime]
        _emit(format_csv(params, header, [row]), args.out)
    else:
        lines = [
            f"overlap error (delta={p.delta:.6g}, k sigma={k_sigma:.6g})",
            f"  lambda      = {rep.lam:.12g}",
            f"  A           = {rep.A:.12g}",
            f"  1 - A       = {rep.one_minus_A:.12g}",
            f"  lambda_max  = {rep.lambda_max:.12g}",
            f"  A_max       = {rep.A_max:.12g}",
            f"  regime      = {rep.regime}",
        ]
        if "A_quadrature" in results:
            lines.append(f"  A quadrature = {results['A_quadrature']:.12g} "
                         f"(deviation {results['A_quadrature_deviation']:.3e})")
        if getattr(args, "verbose", False):
            lines.append(f"  optimizer: {opt.iterations} golden-section steps, "
                         f"1 - A_max = {opt.one_minus_A:.12g}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_entangle(args) -> int:
    _apply_config(args)
    p = _build_params(args)
    Sigma, sigma = _resolve_spreads(args, p)
    if Sigma is None and getattr(args, "lambda_", None) is not None:
        Sigma = sigma * math.sqrt(args.lambda_)
    if Sigma is None:
        raise ValueError("wall spread is required: --Sigma (or --lambda)")
    k = args.k if args.k is not None else 0.0
    sf = post_collision_state(initial_state(Sigma, sigma, k), p)
    kp = ent.kernel_params(sf)
    n_spec = args.n_spectrum if args.n_spectrum is not None else 8
    rep = ent.entanglement_report(sf, n=n_spec)
    params = {"delta": p.delta, "gamma": p.gamma, "Sigma": Sigma,
              "sigma": sigma, "k": k}
    results = {"D": kp.D, "rho": kp.rho, "w": kp.w, "u": kp.u,
               "F0": rep.F0, "measure": rep.measure, "matched": kp.matched,
               "spectrum": list(rep.spectrum_prefix),
               "spectrum_tail_bound": rep.tail_bound}
    if getattr(args, "grid", None):
        from .oracles import schmidt_decompose

        sv = schmidt_decompose(sf, n=args.grid).singular_values
        results["F0_svd"] = float(sv[0] ** 2)
        results["F0_svd_deviation"] = abs(float(sv[0] ** 2) - rep.F0)
    if args.format == "json":
        _emit(format_json(params, results, []), args.out)
    elif args.format == "csv":
        header = ["D", "rho", "w", "u", "F0", "measure", "matched"]
        row = [kp.D, kp.rho, kp.w, kp.u, rep.F0, rep.measure, kp.matched]
        _emit(format_csv(params, header, [row]), args.out)
    else:
        w_str = "inf (matched)" if kp.matched else f"{kp.w:.12g}"
        lines = [
            f"entanglement (delta={p.delta:.6g}, Sigma={Sigma:.6g}, sigma={sigma:.6g}, k={k:.6g})",
            f"  D        = {kp.D:.12g}",
            f"  rho      = {kp.rho:.12g}",
            f"  w        = {w_str}",
            f"  u        = {kp.u:.12g}",
            f"  F0       = {rep.F0:.12g}",
            f"  1 - F0   = {rep.measure:.12g}",
            f"  spectrum = {', '.join(f'{v:.6g}' for v in rep.spectrum_prefix)}",
        ]
        if "F0_svd" in results:
            lines.append(f"  F0 (SVD oracle) = {results['F0_svd']:.12g} "
                         f"(deviation {results['F0_svd_deviation']:.3e})")
        if getattr(args, "verbose", False):
            lines.append(f"  spectrum tail bound = {rep.tail_bound:.3e}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _sweep_values(args) -> np.ndarray:
    if args.points is None or args.points < 2:
        raise ValueError("a sweep needs --points >= 2")
    if args.scale == "log":
        if args.start <= 0.0 or args.stop <= 0.0:
            raise ValueError("log scale requires positive start and stop")
        return np.geomspace(args.start, args.stop, args.points)
    return np.linspace(args.start, args.stop, args.points)


def _sweep_row(parameter: str, value: float, args, p: CollisionParams | None):
    if parameter == "lambda":
        lam, k_sigma = value, (args.ksigma or 0.0)
        rep = eb.error_report(lam, k_sigma, p)
        sf = post_collision_state(initial_state(math.sqrt(lam), 1.0, 0.0), p)
        kp = ent.kernel_params(sf)
        f0 = ent.largest_eigenvalue(kp.w)
        return [lam, k_sigma, rep.A, rep.one_minus_A, f0, 1.0 - f0]
    if parameter == "k_sigma":
        opt = eb.optimal_lambda(value, p)
        lam_small, err_small = eb.error_asymptotic(value, p.delta, "small")
        if value > 0.0:
            lam_large, err_large = eb.error_asymptotic(value, p.delta, "large")
        else:
            lam_large, err_large = math.nan, math.nan
        return [value, opt.lambda_max, opt.A_max, opt.one_minus_A,
                err_small, err_large, opt.regime]
    if parameter == "delta":
        pv = collision_params_from_delta(value)
        opt = eb.optimal_lambda(args.ksigma or 0.0, pv)
        return [value, opt.lambda_max, opt.A_max, opt.one_minus_A]
    if parameter == "w":
        f0 = ent.largest_eigenvalue(value)
        u = 2.0 * math.asinh(0.5 * value)
        return [value, u, f0, 1.0 - f0]
    if parameter == "T":
        if args.mu_kg is None:
            raise ValueError("a T sweep needs --mu-kg")
        design = th.thermal_design(args.mu_kg, value)
        return [value, design.sigma_mu, design.thermal_length, design.k_sigma_est]
    raise ValueError(f"unknown sweep parameter {parameter!r}")


_SWEEP_HEADERS = {
    "lambda": ["lambda", "k_sigma", "A", "one_minus_A", "F0", "measure"],
    "k_sigma": ["k_sigma", "lambda_max", "A_max", "one_minus_A",
                "asymptotic_small", "asymptotic_large", "regime"],
    "delta": ["delta", "lambda_max", "A_max", "one_minus_A"],
    "w": ["w", "u", "F0", "measure"],
    "T": ["T", "sigma_mu", "thermal_length", "k_sigma_est"],
}


def cmd_sweep(args) -> int:
    _apply_config(args)
    if args.parameter not in SWEEP_PARAMETERS:
        raise ValueError(
            f"sweep parameter must be one of {SWEEP_PARAMETERS}, got {args.parameter!r}"
        )
    values = _sweep_values(args)
    needs_params = args.parameter in ("lambda", "k_sigma")
    p = _build_params(args) if needs_params else None

    env_threads = os.environ.get("DECOH_NUM_THREADS")
    max_workers = int(env_threads) if env_threads else min(8, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
        rows = list(pool.map(
            lambda v: _sweep_row(args.parameter, float(v), args, p), values
        ))

    params = {"parameter": args.parameter, "start": args.start, "stop": args.stop,
              "points": args.points, "scale": args.scale}
    if p is not None:
        params["delta"] = p.delta
    header = _SWEEP_HEADERS[args.parameter]
    if args.format == "json":
        results = {"columns": header, "rows": rows}
        _emit(format_json(params, results, []), args.out)
    else:
        _emit(format_csv(params, header, rows), args.out)
    return 0


def cmd_verify(args) -> int:
    _apply_config(args)
    overrides: dict[str, float] = {}
    for item in args.tol or []:
        if "=" not in item:
            raise ValueError(f"--tol expects name=value, got {item!r}")
        name, val = item.split("=", 1)
        if name not in CHECK_NAMES:
            raise ValueError(f"unknown check {name!r}; known: {', '.join(CHECK_NAMES)}")
        overrides[name] = float(val)
    results = run_verification(grid_n=args.grid, tol_overrides=overrides or None)
    ok = all(c.passed for c in results)

    params = {"grid": args.grid, "tolerance_overrides": overrides}
    checks = [
        {"name": c.name, "tolerance": c.tolerance, "deviation": c.deviation,
         "passed": c.passed, "detail": c.detail, "warnings": list(c.warnings)}
        for c in results
    ]
    summary = {"n_checks": len(results), "n_passed": sum(c.passed for c in results),
               "all_passed": ok}
    if args.format == "json":
        _emit(format_json(params, summary, checks), args.out)
    elif args.format == "csv":
        header = ["name", "tolerance", "deviation", "passed"]
        rows = [[c.name, c.tolerance, c.deviation, c.passed] for c in results]
        _emit(format_csv(params, header, rows), args.out)
    else:
        lines = []
        for c in results:
            status = "PASS" if c.passed else "FAIL"
            lines.append(
                f"{status}  {c.name:<24} deviation={c.deviation:.3e}  "
                f"tol={c.tolerance:.1e}  ({c.detail})"
            )
            for w in c.warnings:
                lines.append(f"      warning: {w}")
        lines.append(f"{summary['n_passed']}/{summary['n_checks']} checks passed")
        _emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 1


def cmd_thermal(args) -> int:
    _apply_config(args)
    if args.T is None:
        raise ValueError("temperature is required: --T")
    if args.report_length_scale and args.mu_kg is None:
        design = None
    else:
        if args.mu_kg is None:
            raise ValueError("mass is required: --mu-kg (or use --report-length-scale)")
        design = th.thermal_design(args.mu_kg, args.T)

    # optimized per-collision error coefficient at the thermal momentum
    delta_ref = args.delta if args.delta is not None else 1e-6
    coeff = eb.optimal_lambda(1.0, collision_params_from_delta(delta_ref)).one_minus_A / delta_ref

    budget = None
    if args.collisions is not None:
        f0 = args.F0 if args.F0 is not None else 1.0
        budget = th.amplitude_budget(f0, n=args.collisions)

    params = {"mu_kg": args.mu_kg, "T": args.T, "delta": args.delta,
              "collisions": args.collisions, "F0": args.F0}
    results: dict = {"thermal_length": th.thermal_length(args.T),
                     "error_per_collision_over_delta": coeff}
    if design is not None:
        results.update({
            "sigma_mu": design.sigma_mu,
            "compton_wavelength": design.compton_wavelength,
            "k_sigma_est": design.k_sigma_est,
        })
    if budget is not None:
        results.update({"amplitude": budget.amplitude, "n_half": budget.n_half})
    if args.format == "json":
        _emit(format_json(params, results, []), args.out)
    elif args.format == "csv":
        header = sorted(results)
        _emit(format_csv(params, header, [[results[k] for k in header]]), args.out)
    else:
        lines = [f"thermal design (T={args.T:.6g} K)"]
        lines.append(f"  hbar c / k_B T        = {results['thermal_length']:.12g} m")
        if design is not None:
            lines.append(f"  sigma_mu              = {design.sigma_mu:.12g} m")
            lines.append(f"  compton wavelength    = {design.compton_wavelength:.12g} m")
            lines.append(f"  k sigma estimate      = {design.k_sigma_est:.12g}")
        lines.append(f"  (1-A)/delta at ksigma=1 = {coeff:.6g}")
        if budget is not None:
            lines.append(f"  amplitude after {budget.n} collisions = {budget.amplitude:.12g}")
            lines.append(f"  collisions to half amplitude = {budget.n_half:.6g}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--m", type=float, help="particle mass")
    sub.add_argument("--M", type=float, help="wall mass")
    sub.add_argument("--delta", type=float, help="mass fraction m/(M+m) in place of masses")
    sub.add_argument("--sigma", type=float, help="particle position spread")
    sub.add_argument("--Sigma", help="wall position spread, or 'auto' for spread matching")
    sub.add_argument("--k", type=float, help="particle wavenumber")
    sub.add_argument("--lambda", dest="lambda_", type=float,
                     help="spread ratio Sigma^2/sigma^2")
    sub.add_argument("--ksigma", type=float, help="dimensionless momentum k*sigma")
    sub.add_argument("--grid", type=int,
                     help="also run the matching numeric oracle at N points per axis")
    sub.add_argument("--format", choices=("text", "csv", "json"), default="text")
    sub.add_argument("--out", help="write output to this path instead of stdout")
    sub.add_argument("--config", help="key=value config file; flags override it")
    sub.add_argument("-v", "--verbose", action="store_true",
                     help="include extra diagnostics in text output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decoh",
        description="decoherence and error bounds for a particle bouncing off a quantum wall",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p_err = subs.add_parser("error", help="overlap error against the fixed-wall ideal")
    _add_common(p_err)
    p_err.set_defaults(fn=cmd_error)

    p_ent = subs.add_parser("entangle", help="reduced-kernel entanglement report")
    _add_common(p_ent)
    p_ent.add_argument("--n-spectrum", type=int, help="eigenvalues to list (default 8)")
    p_ent.set_defaults(fn=cmd_entangle)

    p_sw = subs.add_parser("sweep", help="parameter sweep to CSV/JSON")
    _add_common(p_sw)
    p_sw.add_argument("--parameter", required=True,
                      help=f"one of {', '.join(SWEEP_PARAMETERS)}")
    p_sw.add_argument("--start", type=float, required=True)
    p_sw.add_argument("--stop", type=float, required=True)
    p_sw.add_argument("--points", type=int, required=True)
    p_sw.add_argument("--scale", choices=("linear", "log"), default="linear")
    p_sw.add_argument("--mu-kg", dest="mu_kg", type=float, help="mass for T sweeps")
    p_sw.set_defaults(fn=cmd_sweep, format="csv")

    p_ver = subs.add_parser("verify", help="run every oracle-vs-closed-form check")
    p_ver.add_argument("--grid", type=int, help="force oracle grids to N points per axis")
    p_ver.add_argument("--tol", action="append",
                       help="override a check tolerance, name=value (repeatable)")
    p_ver.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p_ver.add_argument("--out")
    p_ver.add_argument("--config")
    p_ver.set_defaults(fn=cmd_verify)

    p_th = subs.add_parser("thermal", help="thermal packet size and collision budget")
    p_th.add_argument("--mu-kg", dest="mu_kg", type=float, help="object mass in kg")
    p_th.add_argument("--T", type=float, help="temperature in kelvin")
    p_th.add_argument("--delta", type=float, help="mass fraction for the error coefficient")
    p_th.add_argument("--collisions", type=int, help="collision count for the budget")
    p_th.add_argument("--F0", type=float, help="per-collision largest eigenvalue")
    p_th.add_argument("--report-length-scale", action="store_true",
                      help="report hbar c/k_B T without needing a mass")
    p_th.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p_th.add_argument("--out")
    p_th.add_argument("--config")
    p_th.set_defaults(fn=cmd_thermal)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
