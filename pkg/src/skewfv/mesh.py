"""Polygonal 2D meshes with owner/neighbour face addressing.

Faces are stored as vertex pairs ordered so that the right-hand normal of
``v0 -> v1`` points out of the owner cell. Internal faces come first, sorted
by (owner, neighbour); boundary faces follow, grouped by patch.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

SPLIT_MODES = ("minimum", "orthogonal", "over-relaxed")


class MeshError(ValueError):
    """Invalid topology or geometry."""


def _readonly(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Mesh:
    points: np.ndarray
    faces: np.ndarray
    owner: np.ndarray
    neighbour: np.ndarray
    patches: dict
    n_cells: int
    lattice: tuple | None = None
    cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "points", _readonly(self.points, np.float64).reshape(-1, 2))
        object.__setattr__(self, "faces", _readonly(self.faces, np.int64).reshape(-1, 2))
        object.__setattr__(self, "owner", _readonly(self.owner, np.int64))
        object.__setattr__(self, "neighbour", _readonly(self.neighbour, np.int64))
        object.__setattr__(self, "patches",
                           {k: _readonly(v, np.int64) for k, v in self.patches.items()})
        nb = self.neighbour
        n_int = int(np.count_nonzero(nb >= 0))
        if np.any(nb[:n_int] < 0) or np.any(nb[n_int:] >= 0):
            raise MeshError("internal faces must precede boundary faces")
        if np.any(self.owner[:n_int] >= nb[:n_int]):
            raise MeshError("owner index must be below neighbour index")
        covered = np.sort(np.concatenate([v for v in self.patches.values()] or [[]]))
        if not np.array_equal(covered, np.arange(n_int, len(nb))):
            raise MeshError("patches must cover every boundary face exactly once")
        object.__setattr__(self, "_n_internal", n_int)

    @property
    def n_faces(self):
        return self.faces.shape[0]

    @property
    def n_internal(self):
        return self._n_internal

    @property
    def n_points(self):
        return self.points.shape[0]

    def with_points(self, points):
        """Same topology, moved vertices."""
        return Mesh(points, self.faces, self.owner, self.neighbour, self.patches,
                    self.n_cells, self.lattice)

    def patch_of_face(self):
        out = np.full(self.n_faces, "", dtype=object)
        for name, idx in self.patches.items():
            out[idx] = name
        return out

    @cached_property
    def cell_faces(self):
        """CSR (ptr, faces, sign); sign is +1 where the cell owns the face."""
        nf = self.n_faces
        cells = np.concatenate([self.owner, self.neighbour[: self.n_internal]])
        fidx = np.concatenate([np.arange(nf), np.arange(self.n_internal)])
        sign = np.concatenate([np.ones(nf), -np.ones(self.n_internal)])
        order = np.lexsort((fidx, cells))
        ptr = np.zeros(self.n_cells + 1, dtype=np.int64)
        np.add.at(ptr, cells + 1, 1)
        return np.cumsum(ptr), fidx[order].astype(np.int64), sign[order]

    @cached_property
    def cell_loops(self):
        """CSR (ptr, vertices) of counter-clockwise vertex loops per cell."""
        ptr, fcs, sign = self.cell_faces
        loops = []
        out_ptr = [0]
        for c in range(self.n_cells):
            nxt = {}
            for f, s in zip(fcs[ptr[c]:ptr[c + 1]], sign[ptr[c]:ptr[c + 1]]):
                a, b = self.faces[f]
                if s < 0:
                    a, b = b, a
                if a in nxt:
                    raise MeshError(f"cell {c}: vertex {a} starts two edges")
                nxt[int(a)] = int(b)
            start = min(nxt)
            loop = [start]
            v = nxt[start]
            while v != start:
                loop.append(v)
                if len(loop) > len(nxt):
                    raise MeshError(f"cell {c}: faces do not close into one loop")
                v = nxt[v]
            if len(loop) != len(nxt):
                raise MeshError(f"cell {c}: faces do not close into one loop")
            loops.extend(loop)
            out_ptr.append(len(loops))
        return np.asarray(out_ptr, dtype=np.int64), np.asarray(loops, dtype=np.int64)

    def cell_polygon(self, c):
        ptr, loops = self.cell_loops
        return self.points[loops[ptr[c]:ptr[c + 1]]]

    @cached_property
    def geometry(self):
        return compute_geometry(self)


# ---------------------------------------------------------------- building

def mesh_from_cells(points, cells, classify, lattice=None):
    """Build a Mesh from counter-clockwise vertex loops.

    ``classify(p0, p1)`` returns the patch name of a boundary edge.
    """
    points = np.asarray(points, dtype=float)
    edges = {}
    for c, loop in enumerate(cells):
        n = len(loop)
        for k in range(n):
            a, b = int(loop[k]), int(loop[(k + 1) % n])
            key = (a, b) if a < b else (b, a)
            edges.setdefault(key, []).append((c, a, b))
    internal, boundary = [], []
    for users in edges.values():
        if len(users) == 2:
            (c1, a1, b1), (c2, a2, b2) = users
            if c1 > c2:
                c1, a1, b1, c2 = c2, a2, b2, c1
            internal.append((c1, c2, a1, b1))
        elif len(users) == 1:
            c, a, b = users[0]
            boundary.append((classify(points[a], points[b]), c, a, b))
        else:
            raise MeshError("edge shared by more than two cells")
    internal.sort()
    names = []
    for name, *_ in boundary:
        if name not in names:
            names.append(name)
    boundary.sort(key=lambda t: (names.index(t[0]), t[1], t[2]))
    faces = [(a, b) for _, _, a, b in internal] + [(a, b) for _, _, a, b in boundary]
    owner = [o for o, _, _, _ in internal] + [c for _, c, _, _ in boundary]
    neigh = [n for _, n, _, _ in internal] + [-1] * len(boundary)
    patches = {}
    start = len(internal)
    for k, (name, *_) in enumerate(boundary):
        patches.setdefault(name, []).append(start + k)
    return Mesh(points, faces, owner, neigh, patches, len(cells), lattice)


def _rectangle_classifier(Lx, Ly, origin):
    x0, y0 = origin
    tol = 1e-9 * max(Lx, Ly)

    def classify(p0, p1):
        mx, my = 0.5 * (p0 + p1)
        if abs(mx - x0) < tol:
            return "left"
        if abs(mx - x0 - Lx) < tol:
            return "right"
        if abs(my - y0) < tol:
            return "bottom"
        if abs(my - y0 - Ly) < tol:
            return "top"
        raise MeshError(f"boundary edge at ({mx}, {my}) not on the rectangle")

    return classify


def _lattice_points(nx, ny, Lx, Ly, origin):
    xs = origin[0] + np.linspace(0.0, Lx, nx + 1)
    ys = origin[1] + np.linspace(0.0, Ly, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    return np.column_stack((X.ravel(), Y.ravel()))


def _check_dims(nx, ny, Lx, Ly):
    if int(nx) != nx or int(ny) != ny or nx < 2 or ny < 2:
        raise MeshError("nx and ny must be integers >= 2")
    if not (Lx > 0 and Ly > 0):
        raise MeshError("domain lengths must be positive")


def build_cartesian(nx, ny, Lx, Ly, origin=(0.0, 0.0)):
    """Uniform quadrilateral mesh of nx by ny cells."""
    _check_dims(nx, ny, Lx, Ly)
    pts = _lattice_points(nx, ny, Lx, Ly, origin)

    def vid(i, j):
        return j * (nx + 1) + i

    cells = [(vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1))
             for j in range(ny) for i in range(nx)]
    return mesh_from_cells(pts, cells, _rectangle_classifier(Lx, Ly, origin),
                           lattice=(nx, ny, Lx, Ly, tuple(origin)))


def build_triangular(nx, ny, Lx, Ly, seed=None, origin=(0.0, 0.0)):
    """Each lattice quad split along one diagonal.

    With ``seed=None`` the diagonal alternates in a checkerboard; otherwise it
    is drawn at random.
    """
    _check_dims(nx, ny, Lx, Ly)
    pts = _lattice_points(nx, ny, Lx, Ly, origin)
    if seed is None:
        flip = [[(i + j) % 2 == 1 for i in range(nx)] for j in range(ny)]
    else:
        flip = np.random.default_rng(seed).random((ny, nx)) < 0.5

    def vid(i, j):
        return j * (nx + 1) + i

    cells = []
    for j in range(ny):
        for i in range(nx):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            if flip[j][i]:
                cells += [(a, b, d), (b, c, d)]
            else:
                cells += [(a, b, c), (a, c, d)]
    return mesh_from_cells(pts, cells, _rectangle_classifier(Lx, Ly, origin),
                           lattice=(nx, ny, Lx, Ly, tuple(origin)))


def _require_lattice(mesh):
    if mesh.lattice is None:
        raise MeshError("distortion needs a mesh built on a regular lattice")
    nx, ny, Lx, Ly, origin = mesh.lattice
    base = _lattice_points(nx, ny, Lx, Ly, origin)
    if base.shape != mesh.points.shape:
        raise MeshError("vertex count does not match the lattice")
    return nx, ny, Lx / nx, Ly / ny, base


def _interior_mask(nx, ny):
    i = np.tile(np.arange(nx + 1), ny + 1)
    j = np.repeat(np.arange(ny + 1), nx + 1)
    return (i > 0) & (i < nx) & (j > 0) & (j < ny), i, j


def distort_systematic(mesh, beta=0.25):
    """Column-alternating chevron distortion of a regular lattice mesh.

    Interior vertex (i, j) moves by ``dy * beta * (-1)**i`` in y; boundary
    vertices stay put.
    """
    if not 0.0 <= beta < 0.5:
        raise MeshError("beta must lie in [0, 0.5)")
    nx, ny, dx, dy, base = _require_lattice(mesh)
    if not np.allclose(mesh.points, base, rtol=0, atol=1e-12 * max(dx, dy)):
        raise MeshError("systematic distortion expects an undistorted lattice mesh")
    inner, i, _ = _interior_mask(nx, ny)
    pts = base.copy()
    pts[inner, 1] += dy * beta * np.where(i[inner] % 2 == 0, 1.0, -1.0)
    out = mesh.with_points(pts)
    check_mesh(out)
    return out


def distort_random(mesh, beta, seed):
    """Displace interior vertices by uniform noise in [-beta*dx, beta*dx] x [-beta*dy, beta*dy]."""
    if not 0.0 <= beta < 0.5:
        raise MeshError("beta must lie in [0, 0.5)")
    nx, ny, dx, dy, _ = _require_lattice(mesh)
    inner, _, _ = _interior_mask(nx, ny)
    rng = np.random.default_rng(seed)
    noise = rng.uniform(-1.0, 1.0, size=(int(inner.sum()), 2)) * beta * np.array([dx, dy])
    pts = np.array(mesh.points)
    pts[inner] += noise
    out = mesh.with_points(pts)
    check_mesh(out)
    return out


# ---------------------------------------------------------------- geometry

def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True, eq=False)
class Geometry:
    """Derived face and cell geometry.

    ``weights`` is the owner weight of linear interpolation at the point
    where the owner-neighbour line crosses the face (``xfp``); ``m`` is the
    offset from that point to the face centre. ``delta_owner`` is the
    advection mesh weight for a face whose upwind cell is the owner.
    """
    cell_centres: np.ndarray
    cell_volumes: np.ndarray
    face_centres: np.ndarray
    Sf: np.ndarray
    magSf: np.ndarray
    d: np.ndarray
    magd: np.ndarray
    xfp: np.ndarray
    m: np.ndarray
    weights: np.ndarray
    delta_owner: np.ndarray
    cache: dict = field(default_factory=dict, repr=False)

    def split(self, mode="over-relaxed"):
        """(Delta, k) per face for the chosen splitting mode."""
        key = ("split", mode)
        if key not in self.cache:
            self.cache[key] = decompose_face_vector(self.Sf, self.d, mode)
        return self.cache[key]


def compute_geometry(mesh):
    pts = mesh.points
    p0 = pts[mesh.faces[:, 0]]
    p1 = pts[mesh.faces[:, 1]]
    nc, ni = mesh.n_cells, mesh.n_internal
    own, nb = mesh.owner, mesh.neighbour[:ni]

    cr = _cross(p0, p1)
    sx = (p0[:, 0] + p1[:, 0]) * cr
    sy = (p0[:, 1] + p1[:, 1]) * cr

    def per_cell(w):
        return (np.bincount(own, weights=w, minlength=nc)
                - np.bincount(nb, weights=w[:ni], minlength=nc))

    area = 0.5 * per_cell(cr)
    if np.any(area <= 0.0):
        bad = int(np.argmin(area))
        raise MeshError(f"cell {bad} has non-positive area {area[bad]:.3e}")
    centres = np.column_stack((per_cell(sx), per_cell(sy))) / (6.0 * area[:, None])

    e = p1 - p0
    Sf = np.column_stack((e[:, 1], -e[:, 0]))
    magSf = np.hypot(Sf[:, 0], Sf[:, 1])
    if np.any(magSf <= 0.0):
        raise MeshError(f"degenerate face {int(np.argmin(magSf))}")
    xf = 0.5 * (p0 + p1)

    d = xf - centres[own]
    d[:ni] = centres[nb] - centres[own[:ni]]
    dS = np.einsum("ij,ij->i", d, Sf)
    if np.any(dS <= 0.0):
        bad = int(np.argmin(dS))
        raise MeshError(f"face {bad}: centre connector does not cross the face (d.S <= 0)")
    magd = np.hypot(d[:, 0], d[:, 1])

    xfp = xf.copy()
    w = np.ones(mesh.n_faces)
    t = _cross(xf[:ni] - centres[own[:ni]], e[:ni]) / _cross(d[:ni], e[:ni])
    xfp[:ni] = centres[own[:ni]] + t[:, None] * d[:ni]
    w[:ni] = np.clip(1.0 - t, 0.0, 1.0)
    m = xf - xfp
    delta_owner = np.einsum("ij,ij->i", xf - centres[own], Sf) / dS

    return Geometry(centres, area, xf, Sf, magSf, d, magd, xfp, m, w, delta_owner)


def decompose_face_vector(Sf, d, mode="over-relaxed"):
    """Split S_f = Delta + k with Delta parallel to d."""
    Sf = np.asarray(Sf, dtype=float)
    d = np.asarray(d, dtype=float)
    dS = np.sum(d * Sf, axis=-1)
    if np.any(dS <= 0.0):
        raise MeshError("d.S_f must be positive")
    magd = np.sqrt(np.sum(d * d, axis=-1))
    dhat = d / magd[..., None]
    if mode == "over-relaxed":
        Delta = d * (np.sum(Sf * Sf, axis=-1) / dS)[..., None]
    elif mode == "orthogonal":
        Delta = dhat * np.sqrt(np.sum(Sf * Sf, axis=-1))[..., None]
    elif mode == "minimum":
        Delta = dhat * (dS / magd)[..., None]
    else:
        raise ValueError(f"unknown splitting mode {mode!r}; choose from {SPLIT_MODES}")
    return Delta, Sf - Delta


# ---------------------------------------------------------------- checks

def _segments_cross(a, b, c, d):
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return (o1 * o2 < 0) and (o3 * o4 < 0)


def is_simple_polygon(poly):
    n = len(poly)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]):
                return False
    return True


def closedness_residual(mesh):
    """max over cells of |sum of outward S_f| / perimeter."""
    g = mesh.geometry
    nc, ni = mesh.n_cells, mesh.n_internal
    own, nb = mesh.owner, mesh.neighbour[:ni]
    out = np.zeros((nc, 2))
    for k in range(2):
        out[:, k] = (np.bincount(own, weights=g.Sf[:, k], minlength=nc)
                     - np.bincount(nb, weights=g.Sf[:ni, k], minlength=nc))
    perim = (np.bincount(own, weights=g.magSf, minlength=nc)
             + np.bincount(nb, weights=g.magSf[:ni], minlength=nc))
    return float(np.max(np.hypot(out[:, 0], out[:, 1]) / perim))


def check_mesh(mesh):
    """Raise MeshError unless every structural invariant holds."""
    g = compute_geometry(mesh)
    ptr, loops = mesh.cell_loops
    for c in range(mesh.n_cells):
        if not is_simple_polygon(mesh.points[loops[ptr[c]:ptr[c + 1]]]):
            raise MeshError(f"cell {c} is self-intersecting")
    if closedness_residual(mesh) > 1e-12:
        raise MeshError("face area vectors do not close")
    if np.any(g.weights < 0) or np.any(g.weights > 1):
        raise MeshError("interpolation weight outside [0, 1]")


def quality_report(mesh):
    g = mesh.geometry
    ni = mesh.n_internal
    d, S = g.d[:ni], g.Sf[:ni]
    cosang = np.einsum("ij,ij->i", d, S) / (g.magd[:ni] * g.magSf[:ni])
    ang = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
    ratio = np.hypot(g.m[:ni, 0], g.m[:ni, 1]) / g.magd[:ni]
    if ni == 0:
        ang = ratio = np.zeros(1)
    return {
        "n_cells": mesh.n_cells,
        "n_faces": mesh.n_faces,
        "max_non_orthogonality_deg": float(ang.max()),
        "mean_non_orthogonality_deg": float(ang.mean()),
        "max_skewness": float(ratio.max()),
        "mean_skewness": float(ratio.mean()),
    }


def mean_cell_width(mesh):
    return float(np.sqrt(np.mean(mesh.geometry.cell_volumes)))


# ---------------------------------------------------------------- text I/O

def write_mesh(mesh, path):
    """Plain-text format with VERTICES, FACES and PATCHES sections."""
    lines = [f"VERTICES {mesh.n_points}"]
    lines += [f"{i} {x:.17g} {y:.17g}" for i, (x, y) in enumerate(mesh.points)]
    lines.append(f"FACES {mesh.n_faces}")
    for f in range(mesh.n_faces):
        a, b = mesh.faces[f]
        lines.append(f"{f} {a} {b} {mesh.owner[f]} {mesh.neighbour[f]}")
    lines.append(f"PATCHES {len(mesh.patches)}")
    for name, idx in mesh.patches.items():
        lines.append(f"{name}: " + " ".join(str(i) for i in idx))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path):
    with open(path) as fh:
        rows = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    pos = 0

    def header(name):
        nonlocal pos
        key, _, count = rows[pos].partition(" ")
        if key != name:
            raise MeshError(f"expected section {name}, found {rows[pos]!r}")
        pos += 1
        return int(count)

    nv = header("VERTICES")
    pts = np.empty((nv, 2))
    for k in range(nv):
        i, x, y = rows[pos + k].split()
        pts[int(i)] = float(x), float(y)
    pos += nv
    nf = header("FACES")
    fv = np.empty((nf, 2), dtype=np.int64)
    own = np.empty(nf, dtype=np.int64)
    nb = np.empty(nf, dtype=np.int64)
    for k in range(nf):
        i, a, b, o, n = (int(t) for t in rows[pos + k].split())
        fv[i] = a, b
        own[i], nb[i] = o, n
    pos += nf
    npatch = header("PATCHES")
    patches = {}
    for k in range(npatch):
        name, _, rest = rows[pos + k].partition(":")
        patches[name.strip()] = [int(t) for t in rest.split()]
    n_cells = int(max(own.max(), nb.max())) + 1
    return Mesh(pts, fv, own, nb, patches, n_cells)
