"""Core mesh/polyline measurements in Euclidean space and the flat torus."""

import math

import numpy as np
import pytest

from plateau_lab import (
    Ambient,
    ClosedPolyline,
    EUCLIDEAN,
    Parallelepiped,
    TriSurfaceMesh,
    boundary_loops,
    boundary_multiplicity,
    euler_characteristic,
    flat_torus,
    is_coherently_oriented,
    mesh_area,
    polyline_length,
)
from plateau_lab.constructions import build_tau_and_E
from plateau_lab.geom.build import chart_torus_mesh, flip_mesh_orientation
from plateau_lab.geom.core import edge_vector


def unit_square_mesh():
    verts = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0],
                      [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]])
    tris = np.array([[0, 1, 2], [0, 2, 3]])
    return TriSurfaceMesh(verts, tris)


def tetrahedron_mesh():
    verts = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0],
                      [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    tris = np.array([[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]])
    return TriSurfaceMesh(verts, tris)


def test_unit_square_measurements():
    m = unit_square_mesh()
    assert abs(mesh_area(m) - 1.0) < 1e-15
    assert euler_characteristic(m) == 1
    assert is_coherently_oriented(m)
    loops = boundary_loops(m)
    assert len(loops) == 1
    assert len(loops[0]) == 4
    assert abs(polyline_length(loops[0]) - 4.0) < 1e-15
    # boundary vertices are flagged automatically
    assert m.boundary_fixed.all()


def test_tetrahedron_is_closed_and_coherent():
    m = tetrahedron_mesh()
    assert euler_characteristic(m) == 2
    assert boundary_loops(m) == []
    assert is_coherently_oriented(m)
    assert not m.boundary_fixed.any()
    # reversing one face breaks coherence but not validity
    tris = m.triangles.copy()
    tris[0] = tris[0, ::-1]
    m2 = TriSurfaceMesh(m.vertices, tris)
    assert not is_coherently_oriented(m2)


def test_triangle_normals_and_areas():
    m = unit_square_mesh()
    areas = m.triangle_areas()
    assert np.allclose(areas, 0.5, atol=1e-15)
    normals = m.triangle_normals()
    assert np.allclose(normals, [[0, 0, 1], [0, 0, 1]], atol=1e-15)


def test_mesh_validation_errors():
    verts = np.zeros((3, 3))
    with pytest.raises(ValueError):
        TriSurfaceMesh(verts, np.array([[0, 1, 1]]))
    with pytest.raises(ValueError):
        TriSurfaceMesh(verts, np.array([[0, 1, 3]]))
    # an edge shared by three triangles is rejected
    verts = np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 1, 0],
                      [0.0, -1, 0], [0.0, 0, 1]])
    tris = np.array([[0, 1, 2], [0, 1, 3], [0, 1, 4]])
    with pytest.raises(ValueError):
        TriSurfaceMesh(verts, tris)
    with pytest.raises(ValueError):
        TriSurfaceMesh(np.array([[0.0, 0, np.nan], [1, 0, 0], [0, 1, 0]]),
                       np.array([[0, 1, 2]]))


def test_replace_vertices_guards_shape():
    m = unit_square_mesh()
    with pytest.raises(ValueError):
        m.replace_vertices(np.zeros((5, 3)))


def test_rigid_motion_leaves_area():
    m = tetrahedron_mesh()
    a0 = mesh_area(m)
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    moved = m.replace_vertices(m.vertices @ q.T + rng.standard_normal(3))
    assert abs(mesh_area(moved) - a0) <= 1e-12 * a0


def test_polyline_basics():
    sq = ClosedPolyline([[0, 0, 0], [2, 0, 0], [2, 2, 0], [0, 2, 0]])
    assert abs(polyline_length(sq) - 8.0) < 1e-15
    rev = sq.reversed()
    assert abs(polyline_length(rev) - 8.0) < 1e-15
    assert np.allclose(rev.vertices[0], sq.vertices[-1])
    with pytest.raises(ValueError):
        ClosedPolyline([[0, 0, 0], [1, 0, 0]])
    with pytest.raises(ValueError):
        ClosedPolyline([[0, 0, 0], [0, 0, 0], [1, 0, 0]])


def test_torus_polyline_lift():
    amb = flat_torus((1.0, 1.0, 1.0))
    # straight loop winding once around x: three points, last segment wraps
    pts = np.array([[0.1, 0.5, 0.5], [0.4, 0.5, 0.5], [0.8, 0.5, 0.5]])
    shifts = np.array([[0, 0, 0], [0, 0, 0], [1, 0, 0]])
    loop = ClosedPolyline(pts, shifts, amb)
    assert abs(polyline_length(loop) - 1.0) < 1e-15
    lift = loop.lifted_vertices()
    assert np.allclose(lift[-1] - lift[0], [1.0, 0.0, 0.0])
    rev = loop.reversed()
    assert abs(polyline_length(rev) - 1.0) < 1e-15
    lift_r = rev.lifted_vertices()
    assert np.allclose(lift_r[-1] - lift_r[0], [-1.0, 0.0, 0.0])


def flat_slice(z=0.3, n=6):
    amb = flat_torus((1.0, 1.0, 1.0))
    u = np.arange(n) / n
    return chart_torus_mesh(lambda a, b: (a, b, z), u, u, amb,
                            u_period=1.0, v_period=1.0)


def test_torus_slice_is_a_flat_torus():
    m = flat_slice()
    assert m.ambient.is_torus
    assert abs(mesh_area(m) - 1.0) < 1e-12
    assert euler_characteristic(m) == 0
    assert boundary_loops(m) == []
    assert is_coherently_oriented(m)
    m.validate()


def test_torus_rewrap_preserves_geometry():
    m = flat_slice()
    a0 = mesh_area(m)
    moved = m.replace_vertices(m.vertices + np.array([0.37, 1.72, -0.4]),
                               rewrap=True)
    moved.validate()
    assert abs(mesh_area(moved) - a0) < 1e-12
    assert np.all(moved.vertices >= 0.0)
    assert np.all(moved.vertices < 1.0)


def test_torus_flip_orientation_keeps_shifts_consistent():
    m = flat_slice()
    f = flip_mesh_orientation(m)
    f.validate()
    assert abs(mesh_area(f) - mesh_area(m)) < 1e-12
    assert is_coherently_oriented(f)


def test_edge_vector_directions():
    m = unit_square_mesh()
    v01 = edge_vector(m, 0, 1)
    assert np.allclose(v01, [1.0, 0.0, 0.0])
    assert np.allclose(edge_vector(m, 1, 0), -v01)
    with pytest.raises(ValueError):
        edge_vector(m, 1, 3)  # diagonal that is not a mesh edge


def test_boundary_multiplicity_of_flat_disk():
    tau, E = build_tau_and_E(0.25)
    assert boundary_multiplicity(E, tau, 1e-9) == 1
    assert boundary_multiplicity(flip_mesh_orientation(E), tau, 1e-9) == -1
    # a target nowhere near the boundary is reported, not silently zero
    far = ClosedPolyline([[9, 9, 9], [10, 9, 9], [10, 10, 9]])
    with pytest.raises(ValueError):
        boundary_multiplicity(E, far, 1e-9)


def test_parallelepiped_queries():
    box = Parallelepiped([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]],
                         [0.0, 0.0, 2.0])
    inside = np.array([[0.5, 0.5, 1.0]])
    outside = np.array([[1.5, 0.5, 1.0]])
    assert box.contains(inside)[0]
    assert not box.contains(outside)[0]
    proj = box.project_outside(inside.copy())
    assert not box.contains(proj, tol=-1e-12)[0]
    assert np.allclose(box.project_outside(outside.copy()), outside)
    with pytest.raises(ValueError):
        Parallelepiped([[0, 0, 0], [1, 0, 0], [1, 1, 1], [0, 1, 0]],
                       [0, 0, 1.0])  # non-planar base


def test_ambient_construction_errors():
    with pytest.raises(ValueError):
        Ambient("euclidean", periods=(1, 1, 1))
    with pytest.raises(ValueError):
        flat_torus((1.0, -1.0, 1.0))
    box = Parallelepiped([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]],
                         [0.0, 0.0, 0.5])
    with pytest.raises(ValueError):
        flat_torus((1.0, 1.0, 1.0), excluded=box)  # touches the domain walls
    assert EUCLIDEAN != flat_torus((1, 1, 1))


def test_torus_mesh_rejects_bad_shifts():
    m = flat_slice()
    bad = m.tri_shifts.copy()
    bad[0, 0, 0] += 1  # breaks the zero-sum-around-triangle invariant
    with pytest.raises(ValueError):
        TriSurfaceMesh(m.vertices, m.triangles, m.boundary_fixed, bad,
                       m.ambient)
