import numpy as np
import pytest

from skewfv.mesh import (MeshError, build_cartesian, build_triangular, check_mesh,
                         closedness_residual, decompose_face_vector, distort_random,
                         distort_systematic, mean_cell_width, quality_report, read_mesh,
                         write_mesh)


def test_cartesian_counts_and_ordering():
    m = build_cartesian(4, 3, 2.0, 1.0)
    assert m.n_cells == 12
    assert m.n_internal == 3 * 3 + 4 * 2
    assert m.n_faces == m.n_internal + 2 * (4 + 3)
    ni = m.n_internal
    assert np.all(m.owner[:ni] < m.neighbour[:ni])
    assert np.all(m.neighbour[ni:] == -1)
    assert set(m.patches) == {"left", "right", "bottom", "top"}


def test_cartesian_geometry_is_orthogonal_and_conjunctional(uniform):
    g = uniform.geometry
    ni = uniform.n_internal
    assert np.allclose(g.m[:ni], 0.0, atol=1e-12)
    Delta, k = g.split("over-relaxed")
    assert np.allclose(k, 0.0, atol=1e-12)
    assert np.allclose(g.weights[:ni], 0.5)
    assert np.allclose(g.cell_volumes, 0.25 * 0.25)


def test_closedness(any_mesh):
    assert closedness_residual(any_mesh) < 1e-12
    check_mesh(any_mesh)


def test_cell_volumes_sum_to_domain(any_mesh):
    assert np.isclose(any_mesh.geometry.cell_volumes.sum(), 2.0 * 1.5 if any_mesh.n_cells == 48
                      else 1.0)


def test_chevron_vertex_rule():
    base = build_cartesian(6, 4, 1.2, 0.8)
    m = distort_systematic(base, 0.25)
    dy = 0.2
    nx, ny = 6, 4
    P0 = base.points.reshape(ny + 1, nx + 1, 2)
    P1 = m.points.reshape(ny + 1, nx + 1, 2)
    for j in range(ny + 1):
        for i in range(nx + 1):
            shift = P1[j, i] - P0[j, i]
            interior = 0 < i < nx and 0 < j < ny
            expect = dy * 0.25 * (-1) ** i if interior else 0.0
            assert np.allclose(shift, (0.0, expect), atol=1e-15)


def test_chevron_has_both_error_types(chevron):
    g = chevron.geometry
    ni = chevron.n_internal
    _, k = g.split()
    assert np.max(np.linalg.norm(g.m[:ni], axis=1)) > 1e-3
    assert np.max(np.linalg.norm(k[:ni], axis=1)) > 1e-3


def test_chevron_hand_geometry_of_one_face():
    # 2x2 square cells of unit size: the single interior vertex (1, 1) moves to
    # (1, 1 - 0.25); centres follow from the two quadrilaterals
    m = distort_systematic(build_cartesian(2, 2, 2.0, 2.0), 0.25)
    g = m.geometry
    ni = m.n_internal
    # face between cell 0 (bottom left) and cell 2 (top left): (0,1)-(1,0.75)
    f = [i for i in range(ni) if {m.owner[i], m.neighbour[i]} == {0, 2}][0]
    assert np.allclose(g.face_centres[f], (0.5, 0.875))
    # bottom-left cell: (0,0),(1,0),(1,0.75),(0,1); area 0.875
    assert np.isclose(g.cell_volumes[0], 0.875)
    c0 = _centroid([(0, 0), (1, 0), (1, 0.75), (0, 1)])
    c2 = _centroid([(0, 1), (1, 0.75), (1, 2), (0, 2)])
    assert np.allclose(g.cell_centres[0], c0)
    assert np.allclose(g.cell_centres[2], c2)
    # x_f': crossing of the centre line with the face line y = 1 - 0.25 x
    d = c2 - c0
    t = (1.0 - 0.25 * c0[0] - c0[1]) / (d[1] + 0.25 * d[0])
    xfp = c0 + t * d
    assert np.allclose(g.xfp[f], xfp)
    assert np.allclose(g.m[f], np.array([0.5, 0.875]) - xfp)
    assert np.isclose(g.weights[f] if m.owner[f] == 0 else 1 - g.weights[f], 1.0 - t)


def _centroid(poly):
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    a = 0.5 * cr.sum()
    return np.array([((x + xn) * cr).sum(), ((y + yn) * cr).sum()]) / (6 * a)


def test_distortion_continuity():
    base = build_cartesian(6, 5, 1.0, 1.0)
    m = distort_systematic(base, 1e-8)
    gb, gm = base.geometry, m.geometry
    assert np.allclose(gb.cell_centres, gm.cell_centres, atol=1e-8)
    assert np.allclose(gb.Sf, gm.Sf, atol=1e-8)


def test_quality_monotone_in_beta():
    base = build_cartesian(8, 8, 1.0, 1.0)
    q1 = quality_report(distort_systematic(base, 0.1))
    q2 = quality_report(distort_systematic(base, 0.25))
    assert q1["max_skewness"] < q2["max_skewness"]
    assert q1["max_non_orthogonality_deg"] < q2["max_non_orthogonality_deg"]
    assert quality_report(base)["max_skewness"] == 0.0


def test_random_distortion_is_seeded():
    base = build_cartesian(6, 6, 1.0, 1.0)
    a = distort_random(base, 0.2, seed=5)
    b = distort_random(base, 0.2, seed=5)
    c = distort_random(base, 0.2, seed=6)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    # boundary vertices stay on the boundary
    moved = np.any(a.points != base.points, axis=1)
    on_edge = ((base.points[:, 0] == 0) | (base.points[:, 0] == 1)
               | (base.points[:, 1] == 0) | (base.points[:, 1] == 1))
    assert not np.any(moved & on_edge)


def test_triangular_mesh():
    m = build_triangular(5, 4, 1.0, 1.0, seed=1)
    assert m.n_cells == 2 * 5 * 4
    assert np.isclose(m.geometry.cell_volumes.sum(), 1.0)
    ptr, loops = m.cell_loops
    assert np.all(np.diff(ptr) == 3)


def test_mean_cell_width(uniform):
    assert np.isclose(mean_cell_width(uniform), 0.25)


def test_decompose_modes():
    S = np.array([[1.0, 0.3]])
    d = np.array([[2.0, 0.0]])
    for mode in ("minimum", "orthogonal", "over-relaxed"):
        Delta, k = decompose_face_vector(S, d, mode)
        assert np.allclose(Delta + k, S)
        assert np.isclose(Delta[0, 1], 0.0)
    assert np.isclose(decompose_face_vector(S, d, "minimum")[0][0, 0], 1.0)
    assert np.isclose(decompose_face_vector(S, d, "orthogonal")[0][0, 0], np.hypot(1, 0.3))
    assert np.isclose(decompose_face_vector(S, d, "over-relaxed")[0][0, 0], 1.09)
    with pytest.raises(MeshError):
        decompose_face_vector(S, -d)


def test_round_trip(tmp_path, chevron):
    p = tmp_path / "mesh.txt"
    write_mesh(chevron, p)
    m = read_mesh(p)
    assert np.array_equal(m.points, chevron.points)
    assert np.array_equal(m.owner, chevron.owner)
    for k in chevron.patches:
        assert np.array_equal(m.patches[k], chevron.patches[k])


def test_invalid_mesh_rejected():
    with pytest.raises((MeshError, ValueError)):
        distort_systematic(build_cartesian(4, 4, 1.0, 1.0), 0.6)
