"""Command line: ``skewfv {mesh,plug,circle,diffusion,converge,oracle}``.

Settings are taken from the case defaults, then ``--case FILE``, then flags.
Every run prints a JSON summary; ``--output DIR`` also writes CSV profiles,
the extrema log and ``summary.json``. With ``--strict`` the exit code is 1
when an invariant was violated.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from ..advection import CORRECTIONS, SCHEMES
from ..diffusion import COEFFICIENT_MODES, MODES
from ..linsys import METHODS
from ..mesh import check_mesh, quality_report, write_mesh
from ..oracle import Oracle1DSpec, solve_reference
from . import io
from .cases import (build_mesh, run_circle_translation, run_convergence_study,
                    run_planar_diffusion, run_plug_flow)
from .config import FAMILIES, defaults_for, load_case

RUNNERS = {
    "plug": ("plug_flow", run_plug_flow),
    "circle": ("circle_translation", run_circle_translation),
    "diffusion": ("planar_diffusion", run_planar_diffusion),
    "converge": ("convergence_study", run_convergence_study),
}


def _floats(text):
    return tuple(float(s) for s in text.split(",") if s.strip())


def _ints(text):
    return tuple(int(s) for s in text.split(",") if s.strip())


def _strs(text):
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _add_mesh_flags(p):
    g = p.add_argument_group("mesh")
    g.add_argument("--mesh", dest="mesh", choices=FAMILIES)
    g.add_argument("--nx", type=int)
    g.add_argument("--ny", type=int)
    g.add_argument("--Lx", type=float)
    g.add_argument("--Ly", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--seed", type=int)


def _add_common(p):
    p.add_argument("--case", help="key = value case file")
    p.add_argument("--output", help="directory for CSV and JSON output")
    p.add_argument("--strict", action="store_true",
                   help="exit with status 1 when an invariant is violated")
    p.add_argument("--line", type=_floats, help="x0,y0,x1,y1 as fractions of the domain")
    p.add_argument("--n-samples", dest="n_samples", type=int)
    _add_mesh_flags(p)


def _add_advection(p):
    g = p.add_argument_group("advection")
    g.add_argument("--scheme", choices=sorted(SCHEMES))
    g.add_argument("--correction", choices=sorted(CORRECTIONS))
    g.add_argument("--gradient", choices=("GG", "LSF"))
    g.add_argument("--k-gamma", dest="k_gamma", type=float)
    g.add_argument("--courant", type=float)
    g.add_argument("--velocity", type=_floats)
    g.add_argument("--solver", choices=METHODS)


def _add_diffusion(p):
    g = p.add_argument_group("diffusion")
    g.add_argument("--H", type=float)
    g.add_argument("--D-g", dest="D_g", type=float)
    g.add_argument("--D-l", dest="D_l", type=float)
    g.add_argument("--sngrad", choices=MODES)
    g.add_argument("--coefficient", choices=COEFFICIENT_MODES)
    g.add_argument("--splitting", choices=("minimum", "orthogonal", "over-relaxed"))
    g.add_argument("--diffusion-gradient", dest="diffusion_gradient", choices=("GG", "LSF"))
    g.add_argument("--time-scheme", dest="time_scheme", choices=("euler", "bdf2"))
    g.add_argument("--k-phase", dest="k_phase", choices=("gas", "liquid"),
                   help="phase fraction K is evaluated from")
    g.add_argument("--weighting", choices=("henry", "volume"),
                   help="fraction the harmonic diffusivity is evaluated at")
    g.add_argument("--n-corr", dest="n_corr", type=int)
    g.add_argument("--dt", type=float)
    g.add_argument("--t-end", dest="t_end", type=float)
    g.add_argument("--oracle-nodes", dest="oracle_nodes", type=int)
    g.add_argument("--oracle-dt", dest="oracle_dt", type=float)
    g.add_argument("--eval-times", dest="eval_times", type=_floats)


def build_parser():
    ap = argparse.ArgumentParser(prog="skewfv", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mesh", help="build a mesh, write it and report its quality")
    p.add_argument("--family", choices=FAMILIES, default="chevron")
    p.add_argument("--nx", type=int, default=64)
    p.add_argument("--ny", type=int, default=32)
    p.add_argument("--Lx", type=float, default=2.0)
    p.add_argument("--Ly", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--output", help="mesh file to write")

    p = sub.add_parser("plug", help="plug flow of an alpha slab")
    _add_common(p)
    _add_advection(p)
    p.add_argument("--slab", type=_floats, help="x0,x1 as fractions of Lx")
    p.add_argument("--travel", type=float, help="distance as a fraction of Lx")

    p = sub.add_parser("circle", help="translation of a circular alpha patch")
    _add_common(p)
    _add_advection(p)
    p.add_argument("--diameter-cells", dest="diameter_cells", type=float)
    p.add_argument("--start-cells", dest="start_cells", type=float)
    p.add_argument("--distance-diameters", dest="distance_diameters", type=float)
    p.add_argument("--subsamples", type=int)

    p = sub.add_parser("diffusion", help="planar species diffusion into a liquid film")
    _add_common(p)
    _add_diffusion(p)

    p = sub.add_parser("converge", help="mesh-convergence study of the gas-phase average")
    _add_common(p)
    _add_diffusion(p)
    p.add_argument("--levels", type=_ints, help="ny of every level, comma separated")
    p.add_argument("--h-values", dest="h_values", type=_floats)
    p.add_argument("--modes", type=_strs)

    p = sub.add_parser("oracle", help="1D two-layer reference solution")
    p.add_argument("--H", type=float, default=1.0)
    p.add_argument("--D-g", dest="D_g", type=float, default=1e-1)
    p.add_argument("--D-l", dest="D_l", type=float, default=1e-5)
    p.add_argument("--length", type=float, default=0.04)
    p.add_argument("--nodes", type=int, default=4001)
    p.add_argument("--dt", type=float, default=1e-5)
    p.add_argument("--t-end", dest="t_end", type=float, default=0.5)
    p.add_argument("--scheme", choices=("euler", "bdf2"), default="bdf2")
    p.add_argument("--output", help="directory for profile.csv and summary.json")
    return ap


_NOT_SPEC = {"command", "case", "strict"}


def case_from_args(args):
    kind, _ = RUNNERS[args.command]
    spec = defaults_for(kind)
    if args.case:
        spec = load_case(args.case, spec)
        if spec.kind != kind:
            raise SystemExit(f"case file kind {spec.kind!r} does not match {args.command!r}")
    fields = spec.to_dict()
    updates = {k: v for k, v in vars(args).items()
               if k not in _NOT_SPEC and k in fields and v is not None}
    return spec.replace(**updates)


def _print(summary):
    json.dump(io._plain(summary), sys.stdout, indent=2, sort_keys=True, default=str)
    sys.stdout.write("\n")


def _cmd_mesh(args):
    mesh = build_mesh(args.family, args.nx, args.ny, args.Lx, args.Ly, args.beta, args.seed)
    check_mesh(mesh)
    if args.output:
        write_mesh(mesh, args.output)
    _print(dict(quality_report(mesh), family=args.family))
    return 0


def _cmd_oracle(args):
    spec = Oracle1DSpec(length=args.length, D_g=args.D_g, D_l=args.D_l, H=args.H,
                        n_nodes=args.nodes, dt=args.dt, t_end=args.t_end, scheme=args.scheme)
    sol = solve_reference(spec)
    m = sol.mass
    summary = {"H": spec.H, "t_end": spec.t_end, "gas_average": sol.gas_average,
               "mass_relative_drift": float(abs(m[-1] - m[0]) / abs(m[0])),
               "c_gas_interface": float(sol.c_gas[0]),
               "c_liquid_interface": float(sol.c_liquid[-1])}
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        sol.write_csv(os.path.join(args.output, "profile.csv"))
        io.write_summary(os.path.join(args.output, "summary.json"), summary)
    _print(summary)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "mesh":
        return _cmd_mesh(args)
    if args.command == "oracle":
        return _cmd_oracle(args)
    spec = case_from_args(args)
    _, runner = RUNNERS[args.command]
    art = runner(spec)
    out = args.output or spec.output
    if out:
        io.write_artifacts(art, out, spec)
    summary = {k: v for k, v in art.summary.items() if k != "mesh_quality"}
    _print(dict(summary, kind=art.kind))
    if args.strict and art.violations:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
