"""Command line interface.

Subcommands: minimize, mountain-pass, verify, blowup, envelope, sweep,
scaling.  Exit codes: 0 on success, 1 on computational failure
(non-convergence, failed certificate), 2 on usage or configuration errors.

A flat key=value config file (keys: potential, q_list, K, modes, tol_g,
tol_r, output_dir) can prefill the sweep/scaling options; explicit flags
win over the file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import envelope as env_mod
from .potential import parse_potential
from .solve import (
    DivergenceError,
    PathCollapseError,
    SeedError,
    SolveOptions,
    minimize,
    mountain_pass,
    seed_negative,
    solve_minimum,
)
from .spectral import field_to_json, load_field
from .sweep import fit_scaling, sweep_q, write_sweep_csv
from .verify import CertifyOptions, certify, efk_blowup_scan

CONFIG_KEYS = ("potential", "q_list", "K", "modes", "tol_g", "tol_r", "output_dir")


class CliError(Exception):
    """Usage/configuration error (exit code 2)."""


def _read_config(path: str) -> dict:
    cfg: dict = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise CliError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key = key.strip()
                if key not in CONFIG_KEYS:
                    raise CliError(f"{path}:{lineno}: unknown config key {key!r}")
                cfg[key] = value.strip()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from exc
    return cfg


def _auto_T(q: float) -> float:
    # midpoint of the admissible pi^2/T^2 interval in every regime
    return math.pi * math.sqrt(2.0 / q)


def _parse_q_list(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise CliError(f"bad q list {text!r}") from exc


def _write_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=1)
    if path is None or path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _solve_options(args) -> SolveOptions:
    return SolveOptions(n_modes=args.modes, tol_g=args.tol_g)


def cmd_minimize(args) -> int:
    p = parse_potential(args.potential)
    T = _auto_T(args.q) if args.T == "auto" else float(args.T)
    opts = _solve_options(args)
    res = solve_minimum(p, args.q, T, opts)
    cert = certify(res.field, p, args.q)
    payload = res.to_dict()
    payload["T"] = T
    payload["certificate"] = cert.to_dict()
    _write_json(payload, args.out)
    return 0 if res.converged else 1


def cmd_mountain_pass(args) -> int:
    p = parse_potential(args.potential)
    T = _auto_T(args.q) if args.T == "auto" else float(args.T)
    opts = _solve_options(args)
    endpoint = seed_negative(p, args.q, T, opts.n_modes)
    res = mountain_pass(p, args.q, T, endpoint, opts)
    cert = certify(res.field, p, args.q)
    payload = res.to_dict()
    payload["T"] = T
    payload["certificate"] = cert.to_dict()
    _write_json(payload, args.out)
    return 0 if res.converged and cert.passed else 1


def cmd_verify(args) -> int:
    p = parse_potential(args.potential)
    try:
        u = load_field(args.solution)
    except (OSError, KeyError, ValueError) as exc:
        raise CliError(f"cannot load solution {args.solution}: {exc}") from exc
    cert = certify(u, p, args.q, CertifyOptions(tol_r=args.tol_r, tol_p=args.tol_p, tol_h=args.tol_h))
    _write_json(cert.to_dict(), args.out)
    return 0 if cert.passed else 1


def cmd_blowup(args) -> int:
    p = parse_potential(args.potential)
    u0s = _parse_q_list(args.u0)
    upp0s = _parse_q_list(args.upp0)
    grid = [(u0, 0.0, upp0, 0.0) for u0 in u0s for upp0 in upp0s]
    reports = efk_blowup_scan(p, args.q, grid, x_max=args.x_max, h=args.h, threshold=args.threshold)
    payload = {
        "potential": p.name,
        "q": args.q,
        "x_max": args.x_max,
        "reports": [r.to_dict() for r in reports],
        "n_escaped": sum(r.escaped for r in reports),
    }
    _write_json(payload, args.out)
    return 0


def _write_table(path: str, ts, vs) -> None:
    with open(path, "w", newline="\n") as fh:
        for t, v in zip(ts, vs):
            fh.write(f"{t:.17g} {v:.17g}\n")


def cmd_envelope(args) -> int:
    import numpy as np

    p = parse_potential(args.potential)
    ts = env_mod._h_input_grid(args.t_max, args.n)
    s = np.sqrt(np.abs(ts))
    g_vals = np.minimum(np.asarray(p.f0(s), dtype=float), np.asarray(p.f0(-s), dtype=float))
    g = env_mod.SampledFunction(ts, g_vals)
    g_star = env_mod.convex_envelope(g)
    tab = env_mod.h_table(p, args.t_max, args.n, allow_nonzero_fpp0=True)
    os.makedirs(args.out_dir, exist_ok=True)
    _write_table(os.path.join(args.out_dir, "g.dat"), g.ts, g.vs)
    _write_table(os.path.join(args.out_dir, "gstar.dat"), g_star.ts, g_star.vs)
    _write_table(os.path.join(args.out_dir, "h.dat"), tab.grid, tab.h_vals)
    _write_table(os.path.join(args.out_dir, "phi.dat"), tab.grid, tab.phi_vals)
    print(f"wrote g.dat, gstar.dat, h.dat, phi.dat to {args.out_dir}")
    return 0


def _apply_config(args, required: tuple) -> None:
    cfg = _read_config(args.config) if args.config else {}
    if args.potential is None:
        args.potential = cfg.get("potential")
    if args.q is None:
        args.q = cfg.get("q_list")
    if args.K is None:
        args.K = float(cfg["K"]) if "K" in cfg else None
    if args.modes is None:
        args.modes = int(cfg["modes"]) if "modes" in cfg else 64
    if args.tol_g is None:
        args.tol_g = float(cfg["tol_g"]) if "tol_g" in cfg else 1e-8
    if args.tol_r is None:
        args.tol_r = float(cfg["tol_r"]) if "tol_r" in cfg else 1e-4
    if args.out_dir is None:
        args.out_dir = cfg.get("output_dir", ".")
    for name in required:
        if getattr(args, name) is None:
            raise CliError(f"missing --{name.replace('_', '-')} (flag or config)")


def _run_sweep(args):
    p = parse_potential(args.potential)
    q_list = _parse_q_list(args.q) if isinstance(args.q, str) else list(args.q)
    opts = SolveOptions(n_modes=args.modes, tol_g=args.tol_g)
    cert_opts = CertifyOptions(tol_r=args.tol_r)
    fields: list = []
    records = sweep_q(p, q_list, args.K, opts, cert_opts, keep_fields=fields)
    return p, records, fields


def cmd_sweep(args) -> int:
    _apply_config(args, required=("potential", "q", "K"))
    p, records, fields = _run_sweep(args)
    os.makedirs(args.out_dir, exist_ok=True)
    write_sweep_csv(records, os.path.join(args.out_dir, "sweep.csv"))
    sol_dir = os.path.join(args.out_dir, "solutions")
    os.makedirs(sol_dir, exist_ok=True)
    for rec, fld in zip(records, fields):
        payload = rec.to_dict()
        payload["field"] = field_to_json(fld)
        _write_json(payload, os.path.join(sol_dir, f"q_{rec.q:g}.json"))
    print(f"wrote {len(records)} records to {os.path.join(args.out_dir, 'sweep.csv')}")
    return 0 if all(r.converged and r.certified for r in records) else 1


def cmd_scaling(args) -> int:
    _apply_config(args, required=("potential", "q", "K"))
    p, records, _ = _run_sweep(args)
    r = args.r if args.r is not None else p.homogeneity_r
    if r is None:
        raise CliError(f"{p.name} is not homogeneous; pass --r explicitly")
    try:
        fit = fit_scaling(records, r)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    _write_json({"slope": fit.slope, "predicted": fit.predicted, "rel_err": fit.rel_err}, args.out)
    return 0 if all(r_.converged for r_ in records) else 1


def _add_solver_flags(sp) -> None:
    sp.add_argument("--potential", required=True, help="e.g. power:4, log_type")
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--T", default="auto", help="half-period, or 'auto' for pi sqrt(2/q)")
    sp.add_argument("--modes", type=int, default=64)
    sp.add_argument("--tol-g", dest="tol_g", type=float, default=1e-8)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shvar", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("minimize", help="direct energy minimization")
    _add_solver_flags(sp)
    sp.add_argument("--out", default="solution.json")
    sp.set_defaults(func=cmd_minimize)

    sp = sub.add_parser("mountain-pass", help="saddle search in the sublinear regime")
    _add_solver_flags(sp)
    sp.add_argument("--out", default="mountain_pass.json")
    sp.set_defaults(func=cmd_mountain_pass)

    sp = sub.add_parser("verify", help="certify a stored solution")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--solution", required=True, help="JSON file with T, N, coeffs")
    sp.add_argument("--tol-r", dest="tol_r", type=float, default=1e-4)
    sp.add_argument("--tol-p", dest="tol_p", type=float, default=1e-6)
    sp.add_argument("--tol-h", dest="tol_h", type=float, default=1e-6)
    sp.add_argument("--out", default=None, help="write certificate JSON here (default stdout)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("blowup", help="escape scan for q <= 0")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--x-max", dest="x_max", type=float, default=20.0)
    sp.add_argument("--h", type=float, default=1e-3)
    sp.add_argument("--threshold", type=float, default=1e6)
    sp.add_argument("--u0", default="-1,-0.5,0.5,1", help="comma list of u(0) values")
    sp.add_argument("--upp0", default="-1,-0.5,0.5,1", help="comma list of u''(0) values")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_blowup)

    sp = sub.add_parser("envelope", help="dump G, G*, H, phi tables")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--t-max", dest="t_max", type=float, default=4.0)
    sp.add_argument("--n", type=int, default=4097)
    sp.add_argument("--out-dir", dest="out_dir", default=".")
    sp.set_defaults(func=cmd_envelope)

    for name, func in (("sweep", cmd_sweep), ("scaling", cmd_scaling)):
        sp = sub.add_parser(name, help=f"q -> 0 {name} experiment")
        sp.add_argument("--potential", default=None)
        sp.add_argument("--q", default=None, help="comma list, descending")
        sp.add_argument("--K", type=float, default=None, help="schedule constant q T^2 = K")
        sp.add_argument("--modes", type=int, default=None)
        sp.add_argument("--tol-g", dest="tol_g", type=float, default=None)
        sp.add_argument("--tol-r", dest="tol_r", type=float, default=None)
        sp.add_argument("--config", default=None, help="key=value config file")
        sp.add_argument("--out-dir", dest="out_dir", default=None)
        if name == "scaling":
            sp.add_argument("--r", type=float, default=None, help="homogeneity degree")
            sp.add_argument("--out", default=None)
        sp.set_defaults(func=func)

    return ap


def run_cli(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SeedError, DivergenceError, PathCollapseError, RuntimeError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
