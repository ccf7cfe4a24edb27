"""Compare the numba and numpy kernel paths.

    python3 benchmarks/bench_kernels.py [--nx 128 --ny 64 --repeat 5] [--end-to-end]

Each kernel is called once to trigger compilation, then timed with the
best of ``--repeat`` runs. ``--end-to-end`` also times a short plug-flow run
in two subprocesses, one with SKEWFV_DISABLE_NUMBA=1.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np
import scipy.sparse as sp

from skewfv import kernels
from skewfv.fields import ScalarField, _lsq_vectors
from skewfv.mesh import build_cartesian, distort_systematic

E2E = """
import time
from skewfv import BACKEND
from skewfv.harness import defaults_for, run_plug_flow
spec = defaults_for("plug_flow").replace(nx={nx}, ny={ny}, travel=0.05)
run_plug_flow(spec.replace(travel=0.005))
t = time.perf_counter()
run_plug_flow(spec)
print(BACKEND, time.perf_counter() - t)
"""


def kernel_cases(mesh, rng):
    g = mesh.geometry
    own, nb, ni = mesh.owner, mesh.neighbour, mesh.n_internal
    f = ScalarField(mesh, rng.random(mesh.n_cells))
    fv = f.face_values()
    vo, vn = _lsq_vectors(mesh, frozenset())
    n = ni
    adv = (kernels.SCHEME_CICSAM, kernels.CORR_SISC, rng.random(n), rng.random(n),
           rng.random(n), rng.uniform(0, 0.5, n), rng.uniform(0.2, 0.8, n),
           rng.normal(scale=0.1, size=n), rng.random(n))
    pts = rng.uniform(0.0, 1.0, size=(2000, 2)) * g.cell_centres.max(axis=0)
    hints = rng.integers(0, mesh.n_cells, size=len(pts))
    ptr, fcs, sign = mesh.cell_faces
    lptr, loops = mesh.cell_loops
    walk = (pts, hints, ptr, fcs, sign, g.face_centres, g.Sf, own, nb, lptr, loops,
            mesh.points, 2 * mesh.n_cells)
    A = sp.diags([-1.0, 4.0, -1.0], [-1, 0, 1], shape=(mesh.n_cells,) * 2, format="csr")
    gs = (A.indptr, A.indices, A.data, rng.random(mesh.n_cells), np.zeros(mesh.n_cells), 5)
    return {
        "gauss_gradient": (own, nb, ni, g.Sf, fv, g.cell_volumes),
        "lsq_gradient": (own, nb, ni, vo, vn, f.values, fv),
        "neighbour_extrema": (own, nb, ni, f.values),
        "advection_weights": adv,
        "walk_locate": walk,
        "gauss_seidel": gs,
    }


def bench(impl, name, args, repeat):
    fn = getattr(impl, name)
    fn(*args)
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nx", type=int, default=128)
    ap.add_argument("--ny", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args(argv)

    if kernels.numba_impl is None:
        from skewfv.kernels import _numba as numba_impl
    else:
        numba_impl = kernels.numba_impl
    mesh = distort_systematic(build_cartesian(args.nx, args.ny, 2.0, 1.0), 0.25)
    cases = kernel_cases(mesh, np.random.default_rng(0))
    print(f"chevron mesh {args.nx}x{args.ny}: {mesh.n_cells} cells, {mesh.n_faces} faces")
    print(f"{'kernel':<20}{'numpy [ms]':>12}{'numba [ms]':>12}{'speed-up':>10}")
    for name, kargs in cases.items():
        t_np = bench(kernels.numpy_impl, name, kargs, args.repeat)
        t_nb = bench(numba_impl, name, kargs, args.repeat)
        print(f"{name:<20}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.1f}")

    if args.end_to_end:
        code = E2E.format(nx=args.nx // 2, ny=args.ny // 2)
        for flag in ("0", "1"):
            env = dict(os.environ, SKEWFV_DISABLE_NUMBA=flag)
            out = subprocess.run([sys.executable, "-c", code], env=env, check=True,
                                 capture_output=True, text=True).stdout.split()
            print(f"plug flow ({out[0]}): {float(out[1]):.2f} s")


if __name__ == "__main__":
    main()
