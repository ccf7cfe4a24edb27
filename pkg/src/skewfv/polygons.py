"""Small polygon utilities for initial conditions and cell averages."""
import numpy as np


def polygon_area(poly):
    """Signed shoelace area (positive for counter-clockwise vertices)."""
    p = np.asarray(poly, dtype=float)
    if len(p) < 3:
        return 0.0
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def clip_halfplane(poly, normal, offset):
    """Part of a convex or simple polygon with normal . x <= offset (Sutherland-Hodgman)."""
    p = np.asarray(poly, dtype=float)
    n = np.asarray(normal, dtype=float)
    s = p @ n - offset
    out = []
    m = len(p)
    for k in range(m):
        a, b = p[k], p[(k + 1) % m]
        sa, sb = s[k], s[(k + 1) % m]
        if sa <= 0.0:
            out.append(a)
        if (sa < 0.0 < sb) or (sb < 0.0 < sa):
            t = sa / (sa - sb)
            out.append(a + t * (b - a))
    return np.array(out).reshape(-1, 2)


def halfplane_fraction(poly, normal, offset):
    """Area fraction of the polygon with normal . x <= offset."""
    total = polygon_area(poly)
    return polygon_area(clip_halfplane(poly, normal, offset)) / total


def fan_samples(poly, n):
    """Equal-area sample points and weights covering a star-shaped polygon.

    Each fan triangle (vertex 0, k, k+1) is split into n^2 congruent
    sub-triangles whose centroids are returned with their areas.
    """
    p = np.asarray(poly, dtype=float)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    up = i + j <= n - 1
    # barycentric centroids of the upward and downward sub-triangles
    bu = np.stack([(i[up] + 1.0 / 3.0), (j[up] + 1.0 / 3.0)], axis=1) / n
    dn = i + j <= n - 2
    bd = np.stack([(i[dn] + 2.0 / 3.0), (j[dn] + 2.0 / 3.0)], axis=1) / n
    bary = np.vstack([bu, bd])
    pts, wts = [], []
    for k in range(1, len(p) - 1):
        a, b, c = p[0], p[k], p[k + 1]
        area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        pts.append(a + bary[:, :1] * (b - a) + bary[:, 1:] * (c - a))
        wts.append(np.full(len(bary), area / (n * n)))
    return np.vstack(pts), np.concatenate(wts)


def cell_average(poly, func, n=16):
    """Area average of func(points) over the polygon by fan sub-sampling."""
    pts, w = fan_samples(poly, n)
    return float(np.dot(w, func(pts)) / w.sum())
