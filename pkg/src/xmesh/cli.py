"""Command line interface.

    xmesh run <config|catalog-name> [--h H] [--out-dir D] [--vtk-every N]
    xmesh sweep <config|catalog-name> --sizes 0.01 0.005 ...
    xmesh demo relay [--anti]
    xmesh phi planar|axisym [--l L] [--T-s K] [--T-l K] [--Q W/m]

Exit status: 0 success, 2 when a step did not converge, 1 on errors.
The log level comes from the XMESH_LOG_LEVEL environment variable.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

import numpy as np

from . import analytic, io
from .cases import (CATALOG, CaseError, convergence_sweep, persistent_inversions, run_case,
                    run_relay_demo)
from .front import ProjectionError
from .mesh import MeshError
from .physics import ICE_WATER
from .solver import LinearSolverError

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2
log = logging.getLogger("xmesh")


def _configure_logging():
    level = os.environ.get("XMESH_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load(name_or_path, h=None):
    if os.path.exists(name_or_path):
        cfg = io.load_config(name_or_path)
    elif name_or_path in CATALOG:
        cfg = CATALOG[name_or_path]()
    else:
        raise CaseError(f"{name_or_path!r} is neither a config file nor a catalog case "
                        f"({', '.join(sorted(CATALOG))})")
    return cfg.with_size(h) if h is not None else cfg


def _out_dir(args, cfg):
    d = args.out_dir or cfg.output.out_dir
    if d:
        os.makedirs(d, exist_ok=True)
    return d


def cmd_run(args):
    cfg = _load(args.config, args.h)
    out = _out_dir(args, cfg)
    every = args.vtk_every if args.vtk_every is not None else cfg.output.vtk_every
    callback = None
    if out and every > 0:
        def callback(step, problem, state, front, report):
            if step % every == 0:
                fields = io.standard_fields(problem.topology, problem.mesh, state, problem.props.T0,
                                            cfg.solver.a_tol)
                io.write_vtk(problem.topology, state, fields,
                             io.snapshot_path(out, step, cfg.output.prefix))
    t = time.perf_counter()
    series = run_case(cfg, callback=callback)
    elapsed = time.perf_counter() - t
    if out:
        io.save_config(cfg, os.path.join(out, "config.txt"))
        io.write_series_csv(series, os.path.join(out, "series.csv"))
        io.write_events_csv(series, os.path.join(out, "events.csv"))
    steps = series.step_iterations()
    print(f"case {cfg.kind}: {len(steps)} steps in {elapsed:.1f} s, "
          f"iterations max {max(steps, default=0)} mean {np.mean(steps) if steps else 0:.1f}")
    if np.isfinite(series.xi_bar()):
        print(f"xi_bar = {series.xi_bar():.6g}")
    for t_ev, kind in series.events:
        print(f"event t = {t_ev / 3600:.6g} h: {kind}")
    if not series.all_converged:
        print(f"{series.converged.count(False)} step(s) did not converge", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_sweep(args):
    cfg = _load(args.config)
    out = _out_dir(args, cfg)
    res = convergence_sweep(cfg, args.sizes, workers=args.workers)
    print("h_e,xi_bar")
    for h, xi in res.rows():
        print(f"{h!r},{xi!r}")
    if res.slope is not None:
        print(f"slope = {res.slope:.4f}")
    if out:
        with open(os.path.join(out, "sweep.csv"), "w", encoding="ascii", newline="\n") as fh:
            fh.write("h_e,xi_bar\n")
            for h, xi in res.rows():
                fh.write("%.17g,%.17g\n" % (h, xi))
    if not all(s.all_converged for s in res.series):
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_demo(args):
    snaps = run_relay_demo(n=args.n, samples=args.samples, anti=args.anti)
    out = args.out_dir
    if out:
        from .mesh import generate_structured_mesh
        os.makedirs(out, exist_ok=True)
        topo, _ = generate_structured_mesh(args.n, args.n, (-0.5, -0.5, 0.5, 0.5))
        for i, s in enumerate(snaps):
            if args.vtk_every and i % args.vtk_every:
                continue
            inv = np.zeros(topo.n_triangles, dtype=int)
            inv[list(s.inverted)] = 1
            fields = io.VtkFields(point={"f": s.values}, cell={"inverted": inv})
            io.write_vtk(topo, s, fields, io.snapshot_path(out, i, "relay"))
    worst = max(s.max_front_residual for s in snaps)
    compat = all(s.compatible for s in snaps)
    persistent = persistent_inversions(snaps)
    print(f"mode {'anti-relay' if args.anti else 'relay'}: {len(snaps)} snapshots, "
          f"max |f| on front {worst:.3g}, compatible at every sample: {compat}, "
          f"persistently inverted elements: {len(persistent)}")
    return EXIT_OK


def cmd_phi(args):
    props = ICE_WATER.with_latent_heat(args.l)
    if args.kind == "planar":
        phi = analytic.solve_phi_planar(props, args.T_s, args.T_l)
    else:
        phi = analytic.solve_phi_axisym(props, args.Q, args.T_l)
    print(repr(phi))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="xmesh", description="X-MESH Stefan problem solver")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=None, help="directory for CSV/VTK output")
    common.add_argument("--vtk-every", type=int, default=None, metavar="N",
                        help="write a VTK snapshot every N steps (0: none)")
    common.add_argument("--seed", type=int, default=0, help="reserved; runs are deterministic")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="run one case")
    r.add_argument("config", help="config file or catalog name")
    r.add_argument("--h", type=float, default=None, help="override the element size")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", parents=[common], help="mesh convergence sweep")
    s.add_argument("config", help="config file or catalog name")
    s.add_argument("--sizes", type=float, nargs="+", required=True)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    d = sub.add_parser("demo", parents=[common], help="mesh-motion demonstrations")
    d.add_argument("which", choices=["relay"])
    d.add_argument("--anti", action="store_true", help="move downstream nodes instead (fails)")
    d.add_argument("--n", type=int, default=10, help="elements per side")
    d.add_argument("--samples", type=int, default=20)
    d.set_defaults(func=cmd_demo)

    f = sub.add_parser("phi", parents=[common], help="front coefficient of the exact solutions")
    f.add_argument("kind", choices=["planar", "axisym"])
    f.add_argument("--l", type=float, default=ICE_WATER.l, help="latent heat [J/kg]")
    f.add_argument("--T-s", dest="T_s", type=float, default=263.15, help="wall temperature [K]")
    f.add_argument("--T-l", dest="T_l", type=float, default=293.15, help="liquid temperature [K]")
    f.add_argument("--Q", type=float, default=100.0, help="sink intensity [W/m]")
    f.set_defaults(func=cmd_phi)
    return p


def main(argv=None):
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CaseError, MeshError, io.ConfigError, LinearSolverError, ProjectionError, LookupError,
            ValueError, OSError) as exc:
        log.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
