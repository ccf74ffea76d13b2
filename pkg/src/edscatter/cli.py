"""Command-line front end: drive the engines over grids, write CSV/JSON.

Outputs are plot-ready columns plus a metadata record.  CSV gets a side-car
``<command>_metadata.json``; JSON holds {"metadata", "columns"} in one file.
Float formatting is fixed at 17 significant digits so identical configs give
byte-identical files, regardless of thread count.
"""

from __future__ import annotations

import argparse
import cmath
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from .akns import to_akns
from .bound_states import MatrixTriplet, validate_pair
from .config import (COMMANDS, RunConfig, config_data, dump_json,
                     format_number, parse_config)
from .direct import (field_invariants, locate_bound_states,
                     scattering_coefficients)
from .marchenko import build_omega, recover, solve_at
from .reflectionless import (E_and_mu, build_model, jost, phase_factor,
                             potentials, to_field, transmissions,
                             transmissions_by_limit)


def _pmap(fn, items, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(v) for v in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _cpx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _triplet_echo(t: MatrixTriplet):
    if t.is_empty:
        return None
    return {"A": [[_cpx(v) for v in row] for row in t.A],
            "B": [[_cpx(v) for v in row] for row in t.B],
            "C": [[_cpx(v) for v in row] for row in t.C]}


def _sorted_eigs(m: np.ndarray) -> list[list[float]]:
    eigs = sorted(np.linalg.eigvals(m), key=lambda z: (z.real, z.imag))
    return [_cpx(z) for z in eigs]


def _write_csv(path: str, columns: dict[str, list]) -> None:
    names = list(columns)
    count = len(columns[names[0]])
    lines = [",".join(names)]
    for i in range(count):
        cells = []
        for name in names:
            v = columns[name][i]
            cells.append(v if isinstance(v, str) else format_number(v))
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _emit(config: RunConfig, columns: dict[str, list], metadata: dict) -> list[str]:
    out_dir = config.out or "."
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if config.format == "csv":
        data_path = os.path.join(out_dir, f"{config.command}.csv")
        _write_csv(data_path, columns)
        meta_path = os.path.join(out_dir, f"{config.command}_metadata.json")
        with open(meta_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dump_json(metadata) + "\n")
        written += [data_path, meta_path]
    else:
        data_path = os.path.join(out_dir, f"{config.command}.json")
        payload = {"metadata": metadata, "columns": columns}
        with open(data_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dump_json(payload) + "\n")
        written.append(data_path)
    return written


def _potential_columns(xs: np.ndarray, q: np.ndarray, r: np.ndarray) -> dict:
    return {
        "x": [float(v) for v in xs],
        "Re q": [float(v.real) for v in q],
        "Im q": [float(v.imag) for v in q],
        "|q|": [float(abs(v)) for v in q],
        "Re r": [float(v.real) for v in r],
        "Im r": [float(v.imag) for v in r],
        "|r|": [float(abs(v)) for v in r],
    }


# =============================================================================
# Commands
# =============================================================================

def _cmd_reflectionless(config: RunConfig) -> tuple[dict, dict]:
    plus, minus = config.plus_triplet(), config.minus_triplet()
    model = build_model(plus, minus)
    xs = config.x_grid.points()
    pairs = _pmap(lambda x: potentials(model, float(x)), list(xs),
                  config.effective_threads())
    q = np.array([p[0] for p in pairs])
    r = np.array([p[1] for p in pairs])
    _, mu = E_and_mu(model)
    metadata = {
        "command": "reflectionless",
        "mu": _cpx(mu),
        "phase": _cpx(phase_factor(model)),
        "transmission_poles": _sorted_eigs(plus.A) if not plus.is_empty else [],
        "transmission_poles_bar": _sorted_eigs(minus.A) if not minus.is_empty else [],
        "plus": _triplet_echo(plus),
        "minus": _triplet_echo(minus),
    }
    return _potential_columns(xs, q, r), metadata


def _cmd_marchenko(config: RunConfig) -> tuple[dict, dict]:
    omega = build_omega(config.dataset())
    grid = config.marchenko.to_grid()
    xs = config.x_grid.points()
    sols = _pmap(lambda x: solve_at(omega, float(x), grid), list(xs),
                 config.effective_threads())
    rec = recover(sols)
    q = np.atleast_1d(rec.field.q_at(xs))
    r = np.atleast_1d(rec.field.r_at(xs))
    worst = max(max(s.conditions) for s in sols)
    metadata = {
        "command": "marchenko",
        "mu": _cpx(rec.mu),
        "mu_integral": _cpx(rec.mu_integral),
        "grid": config.marchenko.out(),
        "max_condition": float(worst),
    }
    return _potential_columns(xs, q, r), metadata


_COEFF_NAMES = ("T", "Tbar", "R", "Rbar", "L", "Lbar")


def _cmd_direct(config: RunConfig) -> tuple[dict, dict]:
    model = build_model(config.plus_triplet(), config.minus_triplet())
    field = to_field(model)
    zs = config.zeta_grid.points()
    threads = config.effective_threads()
    chunks = np.array_split(zs, min(threads, len(zs)))
    parts = _pmap(
        lambda chunk: scattering_coefficients(field, chunk.astype(complex)),
        [c for c in chunks if len(c)], threads)
    coeffs = [c for part in parts for c in part]
    columns: dict[str, list] = {"zeta": [float(v) for v in zs]}
    for name in _COEFF_NAMES:
        vals = [getattr(c, name) for c in coeffs]
        columns[f"Re {name}"] = [float(v.real) for v in vals]
        columns[f"Im {name}"] = [float(v.imag) for v in vals]
    defect = max(c.unitarity_defect for c in coeffs)
    metadata = {
        "command": "direct",
        "unitarity_defect": float(defect),
        "window": [field.x_min, field.x_max],
    }
    return columns, metadata


def _cmd_bridge(config: RunConfig) -> tuple[dict, dict]:
    model = build_model(config.plus_triplet(), config.minus_triplet())
    field = to_field(model)
    inv = field_invariants(field)
    uv = to_akns(field, "uv", invariants=inv)
    ps = to_akns(field, "ps", invariants=inv)
    xs = config.x_grid.points()
    columns: dict[str, list] = {"x": [float(v) for v in xs]}
    for label, fn in (("u", uv.first), ("v", uv.second),
                      ("p", ps.first), ("s", ps.second)):
        vals = [complex(fn(float(x))) for x in xs]
        columns[f"Re {label}"] = [v.real for v in vals]
        columns[f"Im {label}"] = [v.imag for v in vals]
    metadata = {
        "command": "bridge",
        "mu": _cpx(inv.mu),
        "phase": _cpx(cmath.exp(0.5j * inv.mu)),
    }
    return columns, metadata


def _cmd_roundtrip(config: RunConfig) -> tuple[dict, dict]:
    plus, minus = config.plus_triplet(), config.minus_triplet()
    model = build_model(plus, minus)
    field = to_field(model)
    zs = config.zeta_grid.points()
    coeffs = scattering_coefficients(field, zs.astype(complex))
    t_err, tbar_err = [], []
    for z, c in zip(zs, coeffs):
        t_cl, tbar_cl = transmissions(model, complex(z))
        t_err.append(abs(c.T - t_cl))
        tbar_err.append(abs(c.Tbar - tbar_cl))
    columns = {
        "zeta": [float(v) for v in zs],
        "|R|": [abs(c.R) for c in coeffs],
        "|Rbar|": [abs(c.Rbar) for c in coeffs],
        "|T err|": t_err,
        "|Tbar err|": tbar_err,
    }

    def _pole_report(triplet: MatrixTriplet, side: str) -> list[dict]:
        if triplet.is_empty:
            return []
        found = locate_bound_states(field, side=side)
        report = []
        for lam in sorted(set(triplet.eigenvalues()),
                          key=lambda z: (z.real, z.imag)):
            err = min((abs(p.lam - lam) for p in found), default=float("inf"))
            report.append({"lambda": _cpx(lam), "error": float(err)})
        return report

    tol = config.tolerance
    max_r = max(columns["|R|"], default=0.0)
    max_rbar = max(columns["|Rbar|"], default=0.0)
    max_t = max(t_err + tbar_err, default=0.0)
    metadata = {
        "command": "roundtrip",
        "max_abs_R": float(max_r),
        "max_abs_Rbar": float(max_rbar),
        "max_T_err": float(max_t),
        "poles_plus": _pole_report(plus, "plus"),
        "poles_minus": _pole_report(minus, "minus"),
        "tolerance": tol,
        "pass": bool(max(max_r, max_rbar, max_t) <= tol),
    }
    return columns, metadata


_FD_STENCIL = ((-3, -1.0), (-2, 9.0), (-1, -45.0), (1, 45.0), (2, -9.0), (3, 1.0))


def _ode_residual(model, zeta: complex, x: float, h: float = 1e-3) -> float:
    """Largest deviation of the four Jost components from the first-order
    system, with the x-derivative taken by sixth-order differencing."""
    lam = zeta * zeta
    q, r = potentials(model, x)
    worst = 0.0
    samples = {dx: jost(model, zeta, x + dx * h) for dx, _ in _FD_STENCIL}
    center = jost(model, zeta, x)
    for which in (0, 1):
        d = sum(w * samples[dx][which] for dx, w in _FD_STENCIL) / (60.0 * h)
        val = center[which]
        rhs = np.array([-1j * lam * val[0] + zeta * q * val[1],
                        zeta * r * val[0] + 1j * lam * val[1]])
        worst = max(worst, float(np.max(np.abs(d - rhs))))
    return worst


def _cmd_verify(config: RunConfig) -> tuple[dict, dict]:
    plus, minus = config.plus_triplet(), config.minus_triplet()
    diag = validate_pair(plus, minus)
    model = build_model(plus, minus)
    _, mu = E_and_mu(model)
    tol = config.tolerance

    checks: list[tuple[str, float, float]] = []
    checks.append(("pair_spectra", 0.0 if diag.ok else 1.0, 0.5))
    checks.append(("phase_consistency",
                   abs(cmath.exp(0.5j * mu) - phase_factor(model)), tol))
    probe = [0.7, 1.3 + 0.4j]
    ident = 0.0
    routes = 0.0
    for z in probe:
        t, tbar = transmissions(model, z)
        ident = max(ident, abs(t * tbar - 1.0))
        if diag.equal_sizes:
            # the plateau route needs decay at both ends, which an unequal
            # pair cannot deliver
            t_lim, tbar_lim = transmissions_by_limit(model, z)
            routes = max(routes, abs(t - t_lim), abs(tbar - tbar_lim))
    checks.append(("transmission_identity", ident, tol))
    if diag.equal_sizes:
        checks.append(("transmission_routes", routes, 100.0 * tol))
    ode = max(_ode_residual(model, z, x)
              for z in (0.9, 1.6) for x in (-0.7, 0.4))
    checks.append(("ode_residual", ode, 100.0 * tol))

    xs = config.x_grid.points()
    # peak search on at most 41 probes; end evaluations can be expensive for
    # defective pairs, where the engine falls back to high precision
    take = np.unique(np.round(np.linspace(0, len(xs) - 1,
                                          min(len(xs), 41))).astype(int))
    qv = np.array([potentials(model, float(xs[i]))[0] for i in take])
    q_peak = float(np.max(np.abs(qv))) if len(qv) else 0.0
    ends = max(abs(complex(qv[0])), abs(complex(qv[-1])))
    decay_ratio = ends / q_peak if q_peak > 0 else 0.0
    checks.append(("q_end_decay", decay_ratio, 1e-3))

    columns = {
        "check": [name for name, _, _ in checks],
        "residual": [float(res) for _, res, _ in checks],
        "pass": [int(res < cap) for _, res, cap in checks],
    }
    r_minus5 = complex(potentials(model, -5.0)[1])
    r_plus5 = complex(potentials(model, 5.0)[1])
    metadata = {
        "command": "verify",
        "tolerance": tol,
        "warnings": list(diag.warnings),
        "mu": _cpx(mu),
        "r_at_minus_5": _cpx(r_minus5),
        "abs_r_at_minus_5": abs(r_minus5),
        "r_at_plus_5": _cpx(r_plus5),
        "q_peak": q_peak,
        "all_pass": bool(all(columns["pass"])),
    }
    return columns, metadata


_DISPATCH = {
    "reflectionless": _cmd_reflectionless,
    "marchenko": _cmd_marchenko,
    "direct": _cmd_direct,
    "bridge": _cmd_bridge,
    "roundtrip": _cmd_roundtrip,
    "verify": _cmd_verify,
}


def run(config: RunConfig) -> int:
    """Execute one configured command and write its output files."""
    columns, metadata = _DISPATCH[config.command](config)
    written = _emit(config, columns, metadata)
    for path in written:
        print(f"wrote {path}")
    if config.command == "verify":
        for name, res, ok in zip(columns["check"], columns["residual"],
                                 columns["pass"]):
            print(f"{'PASS' if ok else 'FAIL'} {name} residual={res:.3e}")
        for w in metadata["warnings"]:
            print(f"warning: {w}")
    elif "mu" in metadata:
        mu = metadata["mu"]
        print(f"mu = {mu[0]:.12g} + {mu[1]:.12g}i")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edscatter",
        description="Inverse and direct scattering for the energy-dependent "
                    "first-order system.")
    parser.add_argument("command", nargs="?", choices=COMMANDS,
                        help="override the command given in the config file")
    parser.add_argument("--config", required=True, help="path to a JSON run config")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--format", choices=["csv", "json"],
                        help="output format (overrides config)")
    parser.add_argument("--threads", type=int,
                        help="worker threads for grid sweeps "
                             "(overrides config and MARCHENKO_THREADS)")
    parser.add_argument("--tol", type=float,
                        help="verification tolerance (overrides config)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = parse_config(args.config)
        override = {}
        if args.command:
            override["command"] = args.command
        if args.out is not None:
            override["out"] = args.out
        if args.format is not None:
            override["format"] = args.format
        if args.threads is not None:
            override["threads"] = args.threads
        if args.tol is not None:
            override["tolerance"] = args.tol
        if override:
            config = replace(config, **override)
        return run(config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
