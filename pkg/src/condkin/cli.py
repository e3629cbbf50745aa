"""Command line front-end: ``run``, ``verify`` and ``diag``."""
from __future__ import annotations

import argparse
import glob
import json
import os
import sys

import numpy as np

from . import _accel
from .config import RunConfig
from .diagnostics import (MultiscaleConfig, concentration_ladder, diagnostics_csv,
                          multiscale_json_doc, multiscale_sets, phi_alpha)
from .dispersion import DomainError
from .grid import ConfigError, GridMeasure, init_measure
from .integrator import StagnationError, run

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_STAGNATION = 0, 1, 2, 3


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _max_gap(snapshots) -> float:
    ts = [t for t, _ in snapshots]
    return float(np.max(np.diff(ts))) if len(ts) > 1 else 0.0


def _multiscale_doc(snapshots, ms: MultiscaleConfig, model, mu, width):
    result = multiscale_sets(snapshots, ms, model, mu)
    return multiscale_json_doc(result, model, mu, width, _max_gap(snapshots))


def write_outputs(cfg: RunConfig, traj, out_dir: str):
    traj.write(out_dir)
    model, params = cfg.model(), cfg.params()
    with open(os.path.join(out_dir, "config.txt"), "w") as fh:
        fh.write(cfg.dumps())
    with open(os.path.join(out_dir, "diagnostics.csv"), "w") as fh:
        fh.write(diagnostics_csv(traj.snapshots, params, model, cfg.ladder_m_list))
    doc = _multiscale_doc(traj.snapshots, cfg.multiscale(), model, cfg.mu, cfg.grid().width)
    with open(os.path.join(out_dir, "multiscale.json"), "w") as fh:
        fh.write(_dump_json(doc))


def cmd_run(args) -> int:
    try:
        cfg = RunConfig.load(args.config).validate()
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    threads = args.threads if args.threads is not None else (cfg.threads or None)
    _accel.set_threads(threads)
    model, params, spec = cfg.model(), cfg.params(), cfg.grid()
    m0 = init_measure(spec, cfg.profile(), model)
    tracked = {a: phi_alpha(a) for a in cfg.alphas}
    out_dir = args.out or cfg.output_dir
    try:
        traj = run(m0, cfg.control(), params, model, cfg.t_end, cfg.snapshot_stride,
                   fixed_dt=cfg.fixed_dt, tracked=tracked)
    except StagnationError as exc:
        write_outputs(cfg, exc.trajectory, out_dir)
        print(f"stagnation: {exc}", file=sys.stderr)
        return EXIT_STAGNATION
    write_outputs(cfg, traj, out_dir)
    final = traj.final
    print(_dump_json({"steps": len(traj.dts), "t_final": traj.rows[-1][0],
                      "number": final.total_number(), "energy": final.total_energy(),
                      "atom_mass": final.atom_mass, "clip_ledger": traj.clip_ledger,
                      "output_dir": out_dir}), end="")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verification import run_suite

    if args.threads is not None:
        _accel.set_threads(args.threads)
    try:
        results = run_suite(args.suite, seed=args.seed)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    doc = {"suite": args.suite, "seed": args.seed, "properties": [r.as_dict() for r in results],
           "passed": all(r.passed for r in results)}
    text = _dump_json(doc)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    print(text, end="")
    for r in results:
        if not r.passed:
            print(f"FAILED: {r.name}", file=sys.stderr)
    return EXIT_OK if doc["passed"] else EXIT_FAIL


def load_run_dir(path: str):
    """(config, snapshots, trajectory columns) from a ``run`` output directory."""
    cfg_path = os.path.join(path, "config.txt")
    if not os.path.isdir(path) or not os.path.exists(cfg_path):
        raise ConfigError(f"{path}: not a run directory (config.txt missing)")
    cfg = RunConfig.load(cfg_path).validate()
    files = sorted(glob.glob(os.path.join(path, "snapshots", "snap_*.csv")))
    if not files:
        raise ConfigError(f"{path}: no snapshots")
    snaps = []
    for f in files:
        try:
            with open(f) as fh:
                m, t = GridMeasure.from_csv(fh.read())
        except (ValueError, OSError) as exc:
            raise ConfigError(f"{f}: corrupt snapshot ({exc})") from None
        if t is None or m.spec.n_cells != cfg.n_cells:
            raise ConfigError(f"{f}: snapshot does not match the run configuration")
        snaps.append((t, m))
    if any(b[0] < a[0] for a, b in zip(snaps, snaps[1:])):
        raise ConfigError(f"{path}: snapshot times are not ordered")
    traj_rows = None
    tp = os.path.join(path, "trajectory.csv")
    if os.path.exists(tp):
        try:
            traj_rows = np.loadtxt(tp, delimiter=",", skiprows=1, ndmin=2)
        except ValueError as exc:
            raise ConfigError(f"{tp}: corrupt trajectory ({exc})") from None
    return cfg, snaps, traj_rows


def cmd_diag(args) -> int:
    try:
        cfg, snaps, rows = load_run_dir(args.dir)
        model = cfg.model()
        base = cfg.multiscale()
        m_list = [int(v) for v in args.m.split(",")] if args.m else base.m_list
        rho = base.rho if args.rho is None else args.rho
        if args.eps is not None:
            eps = args.eps
        elif args.rho is not None:
            from .diagnostics import eps_window
            lo, hi = eps_window(model, cfg.mu, rho)
            eps = 0.5 * (lo + hi)
        else:
            eps = base.eps
        ms = MultiscaleConfig(m_list, rho, eps, base.c_star if args.cstar is None else args.cstar)
        doc = _multiscale_doc(snaps, ms, model, cfg.mu, cfg.grid().width)
    except (ConfigError, DomainError) as exc:
        print(f"diag error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    final = snaps[-1][1]
    ladder = [[R, mass] for R, mass in concentration_ladder(final, sorted(cfg.ladder_m_list))]
    report = {"multiscale": doc, "ladder_final": ladder}
    if rows is not None and rows.size:
        atom, deficit = rows[:, 3], rows[:, 6]
        report["growth"] = {
            "atom_final": float(atom[-1]), "deficit_final": float(deficit[-1]),
            "atom_non_decreasing": bool(np.all(np.diff(atom) >= 0)),
            "deficit_non_decreasing": bool(np.all(np.diff(deficit) >= -1e-12 * max(rows[0, 1], 1.0))),
        }
    text = _dump_json(report)
    with open(os.path.join(args.dir, "diag.json"), "w") as fh:
        fh.write(text)
    print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="condkin", description=__doc__)
    ap.add_argument("--threads", type=int, default=None, help="override CONDKIN_THREADS")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="integrate a configuration and write outputs")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("verify", help="run a property suite")
    p.add_argument("suite", choices=("identities", "conservation", "dissipation", "supersolution", "oracle", "all"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", default=None, help="also write the JSON report here")
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("diag", help="recompute diagnostics from a run directory")
    p.add_argument("dir")
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--cstar", type=float, default=None)
    p.add_argument("--m", default=None, help="comma separated scale indices")
    p.set_defaults(func=cmd_diag)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
