"""Command line interface: ``solve``, ``map-grid``, ``find-zeros``, ``converge``.

Every subcommand reads a JSON config (``--config``), writes CSV data and a
JSON report into the output directory, and prints a short summary.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .ahlfors import (AhlforsSolution, CartesianGrid, PolarGrid, boundary_omega, derivative,
                      map_grid, solve_ahlfors, zero_count)
from .config import ConfigError, RunConfig, load_config
from .geometry import GeometryError, discretize
from .rh_solver import SolverError
from .zeros import ZeroProblem, ZeroSearchConfig, find_zeros

logger = logging.getLogger("neumann_ahlfors")


def _cx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _write_csv(path: Path, header: list, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _write_report(path: Path, report: dict) -> None:
    path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")


def default_grid(cfg: RunConfig):
    if cfg.grid is not None:
        return cfg.grid
    if all(c.kind == "circle" and c.center == cfg.curves[-1].center for c in cfg.curves):
        outer = cfg.curves[-1]
        r_min = min(c.radius for c in cfg.curves[:-1]) if cfg.m > 1 else 0.0
        return PolarGrid(outer.center, r_min, outer.radius)
    return CartesianGrid()


def _solve(cfg: RunConfig, n: int | None = None, zeros=None) -> tuple[AhlforsSolution, dict]:
    n = n or cfg.n
    timings = {}
    t0 = time.perf_counter()
    boundary = discretize(cfg.curves, n)
    zeros = cfg.zeros if zeros is None else zeros
    if cfg.m > 1 and zeros is None:
        raise ConfigError("zeros: required for solve when there are holes (use find-zeros to locate them)")
    sol = solve_ahlfors(boundary, cfg.a, zeros or (), cfg.aux, plain_cauchy=cfg.plain_cauchy)
    timings["solve_s"] = time.perf_counter() - t0
    return sol, timings


def diagnostics(sol: AhlforsSolution) -> dict:
    """Every diagnostic a report carries."""
    d = sol.diagnostics
    dw = derivative(sol, sol.a)
    return {
        "m": sol.boundary.m,
        "n": sol.boundary.n,
        "a": _cx(sol.a),
        "zeros": [_cx(z) for z in sol.zeros],
        "aux": [_cx(z) for z in sol.aux],
        "h": [float(v) for v in sol.rh.h],
        "h_dispersion": d["h_dispersion"],
        "h_raw_deviation": d["h_raw_deviation"],
        "boundary_modulus_error": d["boundary_modulus_error"],
        "condition_estimate": d["condition_estimate"],
        "residual": d["residual"],
        "c": sol.c,
        "omega_prime_a": _cx(dw),
        "zero_count": zero_count(sol),
    }


def _boundary_rows(sol: AhlforsSolution):
    b = sol.boundary
    w = boundary_omega(sol)
    t = np.tile(b.t, b.m)
    for k in range(b.size):
        j = int(b.component[k])
        yield [k, j, t[k], b.eta[k].real, b.eta[k].imag, sol.rh.gamma[k], sol.rh.mu[k],
               sol.rh.h[j], sol.rh.f_boundary[k].real, sol.rh.f_boundary[k].imag,
               w[k].real, w[k].imag]


BOUNDARY_HEADER = ["node", "component", "t", "eta_re", "eta_im", "gamma", "mu", "h",
                   "f_re", "f_im", "omega_re", "omega_im"]


def _report(command: str, cfg: RunConfig, diag: dict, timings: dict, **extra) -> dict:
    report = {"command": command, "version": __version__, "config": cfg.to_dict(),
              "diagnostics": diag, "timings": timings}
    report.update(extra)
    return report


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_solve(cfg: RunConfig) -> dict:
    sol, timings = _solve(cfg)
    out = _out_dir(cfg)
    _write_csv(out / "boundary.csv", BOUNDARY_HEADER, _boundary_rows(sol))
    report = _report("solve", cfg, diagnostics(sol), timings)
    _write_report(out / "report.json", report)
    return report


def _polyline_rows(lines):
    for pid, line in enumerate(lines):
        for i, z in enumerate(line):
            yield [pid, i, float(z.real), float(z.imag)]


def cmd_map_grid(cfg: RunConfig) -> dict:
    sol, timings = _solve(cfg)
    t0 = time.perf_counter()
    image = map_grid(sol, default_grid(cfg))
    timings["map_grid_s"] = time.perf_counter() - t0
    out = _out_dir(cfg)
    header = ["polyline", "point", "re", "im"]
    _write_csv(out / "grid_original.csv", header, _polyline_rows(image.originals))
    _write_csv(out / "grid_image.csv", header, _polyline_rows(image.images))
    _write_csv(out / "boundary.csv", BOUNDARY_HEADER, _boundary_rows(sol))
    grid = {"polylines": len(image.originals), "points": int(sum(len(p) for p in image.images)),
            "dropped": image.dropped, "near_boundary": image.flagged,
            "max_image_modulus": float(max(np.abs(p).max() for p in image.images))}
    report = _report("map-grid", cfg, diagnostics(sol), timings, grid=grid)
    _write_report(out / "report.json", report)
    return report


def cmd_find_zeros(cfg: RunConfig) -> dict:
    if cfg.m < 2:
        raise ConfigError("curves: find-zeros needs at least one hole (m >= 2); nothing to search")
    t0 = time.perf_counter()
    boundary = discretize(cfg.curves, cfg.n)
    problem = ZeroProblem(boundary, cfg.a, cfg.aux)
    result = find_zeros(problem, ZeroSearchConfig(cfg.initial, cfg.max_iter, cfg.tol))
    timings = {"search_s": time.perf_counter() - t0}
    sol, t_solve = _solve(cfg, zeros=result.zeros)
    timings.update(t_solve)
    out = _out_dir(cfg)
    _write_csv(out / "boundary.csv", BOUNDARY_HEADER, _boundary_rows(sol))
    trace_header = ["iteration"] + [f"a{j + 1}_{p}" for j in range(cfg.m - 1) for p in ("re", "im")] + ["objective"]
    _write_csv(out / "search_trace.csv", trace_header,
               ([it] + [v for z in pts for v in (z.real, z.imag)] + [obj] for it, pts, obj in result.trace))
    search = {"zeros": [_cx(z) for z in result.zeros], "initial": [_cx(z) for z in result.initial],
              "objective": result.objective, "log_c": result.log_c,
              "iterations": result.iterations, "converged": result.converged,
              "trace": [{"iteration": it, "candidates": [_cx(z) for z in pts], "objective": obj}
                        for it, pts, obj in result.trace]}
    report = _report("find-zeros", cfg, diagnostics(sol), timings, search=search)
    _write_report(out / "report.json", report)
    return report


def _oracle_error(cfg: RunConfig, sol: AhlforsSolution) -> float | None:
    if cfg.oracle != "mobius":
        return None
    image = map_grid(sol, default_grid(cfg))
    z = np.concatenate(image.originals)
    a = complex(cfg.a)
    exact = (z - a) / (1 - np.conj(a) * z)
    return float(np.abs(np.concatenate(image.images) - exact).max())


def cmd_converge(cfg: RunConfig, n_list) -> dict:
    rows, table = [], []
    timings = {}
    for n in n_list:
        sol, t = _solve(cfg, n=n)
        timings[f"n={n}"] = t["solve_s"]
        err = _oracle_error(cfg, sol)
        d = sol.diagnostics
        entry = {"n": n, "boundary_modulus_error": d["boundary_modulus_error"],
                 "h_raw_deviation": d["h_raw_deviation"], "h_dispersion": d["h_dispersion"],
                 "map_error": err}
        table.append(entry)
        rows.append([n, d["boundary_modulus_error"], d["h_raw_deviation"], d["h_dispersion"],
                     "" if err is None else err])
    out = _out_dir(cfg)
    _write_csv(out / "convergence.csv",
               ["n", "boundary_modulus_error", "h_raw_deviation", "h_dispersion", "map_error"], rows)
    report = _report("converge", cfg, diagnostics(sol), timings, convergence=table)
    _write_report(out / "report.json", report)
    return report


def _even_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None
    if not values or any(v < 4 or v % 2 for v in values):
        raise argparse.ArgumentTypeError("every n must be an even integer >= 4")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neumann-ahlfors",
                                     description="Ahlfors map of multiply connected regions")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON run configuration")
    common.add_argument("--n", type=int, help="nodes per curve (overrides the config)")
    common.add_argument("--out", help="output directory (overrides the config)")
    common.add_argument("--plain-cauchy", action="store_true",
                        help="use the unnormalized Cauchy sum for interior values")
    common.add_argument("--verbose", action="store_true")
    sub.add_parser("solve", parents=[common], help="solve with known zeros and write boundary data")
    sub.add_parser("map-grid", parents=[common], help="map a grid through the Ahlfors map")
    sub.add_parser("find-zeros", parents=[common], help="locate the unknown zeros, then solve")
    conv = sub.add_parser("converge", parents=[common], help="diagnostics over several n")
    conv.add_argument("--n-list", type=_even_list, default=[32, 64, 128],
                      help="comma separated even n values (default 32,64,128)")
    return parser


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.n is not None:
        if args.n < 4 or args.n % 2:
            raise ConfigError(f"n: must be an even integer >= 4, got {args.n}")
        cfg.n = args.n
    if args.out:
        cfg.out = args.out
    cfg.plain_cauchy = cfg.plain_cauchy or args.plain_cauchy
    cfg.verbose = cfg.verbose or args.verbose
    return cfg


def _summary(report: dict) -> str:
    d = report["diagnostics"]
    lines = [f"{report['command']}: m={d['m']} n={d['n']} c={d['c']:.12g}",
             f"  h = {', '.join(f'{v:.12g}' for v in d['h'])}",
             f"  h_dispersion={d['h_dispersion']:.3e}  h_raw_deviation={d['h_raw_deviation']:.3e}",
             f"  boundary_modulus_error={d['boundary_modulus_error']:.3e}  "
             f"zero_count={d['zero_count']:.10f}  cond={d['condition_estimate']:.3e}"]
    if "search" in report:
        s = report["search"]
        lines.append(f"  initial guesses: {s['initial']}")
        lines.append(f"  zeros: {s['zeros']}  converged={s['converged']}  objective={s['objective']:.3e}")
    if "convergence" in report:
        for row in report["convergence"]:
            err = "" if row["map_error"] is None else f"  map_error={row['map_error']:.3e}"
            lines.append(f"  n={row['n']:5d}  modulus={row['boundary_modulus_error']:.3e}  "
                         f"h_raw={row['h_raw_deviation']:.3e}{err}")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if cfg.verbose:
            logging.getLogger().setLevel(logging.INFO)
        if args.command == "solve":
            report = cmd_solve(cfg)
        elif args.command == "map-grid":
            report = cmd_map_grid(cfg)
        elif args.command == "find-zeros":
            report = cmd_find_zeros(cfg)
        else:
            report = cmd_converge(cfg, args.n_list)
    except (ConfigError, GeometryError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(_summary(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
