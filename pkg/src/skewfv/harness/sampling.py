"""Line sampling of cell fields (nearest containing cell)."""
import numpy as np

from ..fields import locate_points


def line_points(p0, p1, n):
    """n points strictly inside the segment, at the centres of n equal pieces."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    s = (np.arange(n) + 0.5) / n
    return s, p0 + s[:, None] * (p1 - p0)


def locate_along(mesh, pts):
    """Containing cell of each point, walking from the previous hit."""
    cells = np.empty(len(pts), dtype=np.int64)
    hint = int(np.argmin(np.sum((mesh.geometry.cell_centres - pts[0]) ** 2, axis=1)))
    for k, p in enumerate(pts):
        c = int(locate_points(mesh, p[None, :], [hint])[0])
        cells[k] = c
        if c >= 0:
            hint = c
    return cells


def sample_line(values, mesh, p0, p1, n=200):
    """Rows (s, x, y, cell, value) with the value of the cell containing each point."""
    values = np.asarray(values, dtype=float)
    s, pts = line_points(p0, p1, n)
    cells = locate_along(mesh, pts)
    vals = np.where(cells >= 0, values[np.maximum(cells, 0)], np.nan)
    return [(float(si), float(p[0]), float(p[1]), int(c), float(v))
            for si, p, c, v in zip(s, pts, cells, vals)]


def line_cells(mesh, p0, p1, n=400):
    """Distinct cells crossed by the segment, in order along it."""
    _, pts = line_points(p0, p1, n)
    cells = locate_along(mesh, pts)
    out = []
    for c in cells:
        if c >= 0 and c not in out:
            out.append(int(c))
    return np.array(out, dtype=np.int64)
