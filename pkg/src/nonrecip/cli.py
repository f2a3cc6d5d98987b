"""Command-line front end.

Exit codes: 0 success, 1 domain error, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, dumps, fig3_preset, load
from .core import NonrecipError
from .couplings import isolation_quantities, second_order_bounds
from .frame import resonance_residuals
from .optimizer import FREE_VARS, maximize_backward
from .rwa_audit import coefficient_catalog, rwa_margin
from .scattering import isolation_bandwidth, isolation_db, mechanical_susceptibility, smatrix

ENV_CONFIG = "NONRECIP_CONFIG"
SMATRIX_HEADER = ["omega_rad_s", "abs2_S11", "abs2_S12", "abs2_S21", "abs2_S22", "arg_S12_rad",
                  "arg_S21_rad", "abs2_T11", "abs2_T12", "abs2_T21", "abs2_T22"]


class UsageError(Exception):
    pass


def _c(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=float) + "\n"


def _load_config(args) -> RunConfig:
    if getattr(args, "preset", None):
        return fig3_preset(args.preset)
    path = args.config or os.environ.get(ENV_CONFIG)
    if not path:
        raise UsageError(f"no configuration: pass --config, --preset or set {ENV_CONFIG}")
    try:
        return load(path)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None


def smatrix_rows(result) -> list[list[float]]:
    S, T = result.S, result.T
    rows = []
    for i, w in enumerate(result.omega_grid):
        rows.append([float(w), abs(S[i, 0, 0]) ** 2, abs(S[i, 0, 1]) ** 2, abs(S[i, 1, 0]) ** 2,
                     abs(S[i, 1, 1]) ** 2, float(np.angle(S[i, 0, 1])), float(np.angle(S[i, 1, 0])),
                     abs(T[i, 0, 0]) ** 2, abs(T[i, 0, 1]) ** 2, abs(T[i, 1, 0]) ** 2,
                     abs(T[i, 1, 1]) ** 2])
    return rows


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def cmd_frame(args, cfg: RunConfig):
    d = cfg.design()
    rep = d.frame_report
    out = {
        "Delta_L": d.bare.Delta_L, "omega_LC0": d.bare.omega_LC0,
        "Delta": d.frame.Delta, "omega_LC": d.frame.omega_LC, "delta": d.frame.delta,
        "omega_1": d.bare.omega_1, "omega_2": d.bare.omega_2,
        "omega_tilde_1": d.frame.omega_tilde_1, "omega_tilde_2": d.frame.omega_tilde_2,
        "omega_plus": d.drives.omega_plus, "omega_X": d.drives.omega_X,
        "resonance_residuals": resonance_residuals(d.frame, d.drives),
        "iterations": rep.iterations if rep else 0,
        "residual": rep.residual if rep else 0.0,
        "shift_Delta": rep.shift_Delta if rep else 0.0,
        "shift_omega_LC": rep.shift_omega_LC if rep else 0.0,
        "strained": rep.strained if rep else False,
    }
    _emit(_json(out), args.out)


def cmd_harmonics(args, cfg: RunConfig):
    cat = cfg.design().catalog
    entries = [{**r, "omega_rad_s": cat.frequency(k)} for k, r in zip(cat.entries, cat.to_records())]
    _emit(_json({"mode": cat.mode_flag, "omega_plus": cat.omega_plus, "omega_X": cat.omega_X,
                 "entries": entries}), args.out)


def cmd_couplings(args, cfg: RunConfig):
    d = cfg.design()
    b11, b22 = second_order_bounds(d.catalog)
    out = {}
    for tag, c in (("closed", d.couplings), ("assembled", d.couplings_assembled)):
        out[tag] = {k: _c(getattr(c, k)) for k in ("g11", "g12", "g21", "g22")}
    out["mu"], out["nu"] = d.couplings.mu, d.couplings.nu
    out["second_order_bound_g11"], out["second_order_bound_g22"] = b11, b22
    cm1 = mechanical_susceptibility(d.bare.gamma_m1, 1, d.frame.delta, cfg.sweep.omega_iso)
    cm2 = mechanical_susceptibility(d.bare.gamma_m2, 2, d.frame.delta, cfg.sweep.omega_iso)
    iq = isolation_quantities(d.bare, d.drives, d.chis, complex(cm1 / cm2))
    out["r"], out["s"] = _c(iq.r), _c(iq.s)
    out["G_param"], out["varphi"] = iq.G_param, iq.varphi
    out["drives"] = {"V_mag": d.drives.V_mag, "phi_X": d.drives.phi_X}
    _emit(_json(out), args.out)


def cmd_rwa_audit(args, cfg: RunConfig):
    d = cfg.design()
    cat = coefficient_catalog(d.catalog, d.bare, d.frame)
    rep = rwa_margin(cat, d.bare.kappa, d.bare.gamma_LC, args.margin or cfg.sweep.margin,
                     couplings=d.couplings, gamma_m=(d.bare.gamma_m1, d.bare.gamma_m2))
    out = rep.to_dict()
    out["worst_label"] = rep.worst_label
    out["static_terms"] = sorted(cat.static_terms)
    _emit(_json(out), args.out)


def cmd_smatrix(args, cfg: RunConfig):
    d = cfg.design()
    res = smatrix(d.bare, d.frame, d.couplings, cfg.sweep.grid(), cfg.sweep.io_convention)
    _emit(write_csv(SMATRIX_HEADER, smatrix_rows(res)), args.out)


def cmd_isolate(args, cfg: RunConfig):
    d = replace(cfg, isolate=True).design()
    sol = d.isolation
    _emit(_json(sol.to_dict()), args.out)
    if args.write_config:
        Path(args.write_config).write_text(dumps(cfg.with_drives(sol.drives)), encoding="utf-8")


def _parse_bounds(text: str, free: list[str]) -> dict:
    bounds = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        try:
            name, rng = part.split("=")
            lo, hi = rng.split(":")
            bounds[name.strip()] = (float(lo), float(hi))
        except ValueError:
            raise UsageError(f"bad bounds entry {part!r}; expected name=lo:hi") from None
    missing = [v for v in free if v not in bounds]
    if missing:
        raise UsageError(f"missing bounds for {missing}")
    return bounds


def cmd_optimize(args, cfg: RunConfig):
    free = [v.strip() for v in args.free.split(",") if v.strip()]
    bad = [v for v in free if v not in FREE_VARS]
    if not free or bad:
        raise UsageError(f"--free must list names from {', '.join(FREE_VARS)}")
    bounds = _parse_bounds(args.bounds, free)
    rep = maximize_backward(cfg.base_design(), free, bounds, budget=args.budget, grid_points=args.grid)
    _emit(_json(rep.to_dict()), args.out)
    if args.trace:
        rows = [[i, *[e.point.get(v, float("nan")) for v in free], e.objective, int(e.rwa_pass),
                 e.status, best] for i, (e, best) in enumerate(zip(rep.trace, rep.running_best))]
        Path(args.trace).write_text(
            write_csv(["index", *free, "objective", "rwa_pass", "status", "running_best"], rows),
            encoding="utf-8")


def cmd_oracle(args, cfg: RunConfig):
    from .oracle import verify_expansion

    d = cfg.design()
    o = cfg.oracle
    cmp = verify_expansion(d.bare, d.drives, mode=args.mode or o.mode,
                           drive_scale=args.drive_scale or o.drive_scale, tol=o.tol, t_end=o.t_end,
                           periods=o.periods, scaling=not args.no_scaling)
    _emit(_json(cmp.to_dict()), args.out)
    if args.csv:
        rows = [[r.label, r.min_order, r.max_order, *_c(r.analytic), *_c(r.measured), r.rel_err]
                for r in cmp.rows]
        Path(args.csv).write_text(write_csv(
            ["label", "min_order", "max_order", "analytic_re", "analytic_im", "measured_re",
             "measured_im", "rel_err"], rows), encoding="utf-8")


def cmd_reproduce_fig3(args, cfg_unused):
    cfg = fig3_preset(args.panel)
    d = cfg.design()
    res = smatrix(d.bare, d.frame, d.couplings, cfg.sweep.grid(), cfg.sweep.io_convention)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"fig3{args.panel}.csv"
    path.write_text(write_csv(SMATRIX_HEADER, smatrix_rows(res)), encoding="utf-8")
    bw, peak = isolation_bandwidth(res)
    i0 = res.at(0.0)
    summary = {"csv": str(path), "abs2_S12_at_0": float(res.abs2("S12")[i0]),
               "abs2_S21_at_0": float(res.abs2("S21")[i0]),
               "isolation_db_at_0": float(isolation_db(res)[i0]),
               "bandwidth_20dB_rad_s": bw, "peak_isolation_db": peak,
               "V_mag": d.drives.V_mag, "phi_X": d.drives.phi_X,
               "Delta_L": d.bare.Delta_L, "omega_LC0": d.bare.omega_LC0}
    sys.stdout.write(_json(summary))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nonrecip", description="Nonreciprocal rf-to-optical conversion model.")
    sub = p.add_subparsers(dest="command", metavar="command")

    def add(name, func, help_, aliases=(), config=True):
        sp = sub.add_parser(name, help=help_, aliases=list(aliases))
        if config:
            sp.add_argument("--config", help=f"config file (default ${ENV_CONFIG})")
            sp.add_argument("--preset", choices=["a", "b"], help="use built-in reference parameter set a or b")
            sp.add_argument("--out", help="output file (default stdout)")
        sp.set_defaults(func=func)
        return sp

    add("frame", cmd_frame, "resolve bare detunings for the frame targets")
    add("harmonics", cmd_harmonics, "mean-field harmonic catalog as JSON", aliases=["dump-harmonics"])
    add("couplings", cmd_couplings, "closed-form and assembled effective couplings")
    sp = add("rwa-audit", cmd_rwa_audit, "rotating-wave validity audit")
    sp.add_argument("--margin", type=float, default=None)
    add("smatrix", cmd_smatrix, "S and T sweep as CSV")
    sp = add("isolate", cmd_isolate, "solve the rf drive for isolation at omega_iso")
    sp.add_argument("--write-config", help="write the config with the solved drive")
    sp = add("optimize", cmd_optimize, "maximize backward conversion")
    sp.add_argument("--free", required=True, help="comma list, e.g. delta,gamma_LC")
    sp.add_argument("--bounds", required=True, help="e.g. delta=-1e4:-100,gamma_LC=2e4:2e5")
    sp.add_argument("--budget", type=int, default=2000)
    sp.add_argument("--grid", type=int, default=25, help="grid points per axis")
    sp.add_argument("--trace", help="CSV trace output")
    sp = add("oracle", cmd_oracle, "time-domain check of the harmonic expansion")
    sp.add_argument("--mode", choices=["paper-literal", "drive-shifted"], default=None)
    sp.add_argument("--drive-scale", type=float, default=None)
    sp.add_argument("--no-scaling", action="store_true", help="skip the half-drive rerun")
    sp.add_argument("--csv", help="per-frequency error table")
    sp = add("reproduce-fig3", cmd_reproduce_fig3, "write fig3<panel>.csv for a built-in reference set", config=False)
    sp.add_argument("--panel", choices=["a", "b"], required=True)
    sp.add_argument("--outdir", default=".")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = _load_config(args) if args.func is not cmd_reproduce_fig3 else None
        if cfg is not None and args.func is cmd_optimize and args.budget < 1:
            raise UsageError("--budget must be >= 1")
        args.func(args, cfg)
    except (UsageError, ConfigError) as exc:
        print(f"nonrecip: error: {exc}", file=sys.stderr)
        return 2
    except (NonrecipError, ValueError) as exc:
        print(f"nonrecip: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
