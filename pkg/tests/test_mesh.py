from __future__ import annotations

import numpy as np
import pytest

import posemetric as pm
from posemetric import shapes

UNIT_TRIANGLE = pm.TriangleMesh(
    [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [[0, 1, 2]]
)

# Second moment of the unit triangle about the origin (integral, not normalized):
# (S/12) * (9 o o^T + a a^T + b b^T + c c^T) with S = 1/2, o = (1/3, 1/3, 0).
UNIT_TRIANGLE_SIGMA = (0.5 / 12.0) * np.array(
    [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 0.0]]
)


def uncentered_second_moment(mesh):
    """Integral of x x^T over the weighted surface (from the centered stats)."""
    area, centroid, cov = pm.mesh_surface_stats(mesh)
    return area * (cov + np.outer(centroid, centroid))


def test_unit_triangle_area_centroid():
    area, centroid, _ = pm.mesh_surface_stats(UNIT_TRIANGLE)
    assert area == pytest.approx(0.5, abs=1e-15)
    assert np.allclose(centroid, [1 / 3, 1 / 3, 0.0], atol=1e-15)


def test_unit_triangle_second_moment_closed_form():
    assert np.abs(uncentered_second_moment(UNIT_TRIANGLE) - UNIT_TRIANGLE_SIGMA).max() < 1e-15


def test_unit_triangle_second_moment_monte_carlo_oracle():
    # independent check of the 12-point rule by direct integration
    rng = np.random.default_rng(123)
    pts = pm.sample_surface(UNIT_TRIANGLE, 400_000, rng)
    mc = 0.5 * pts.T @ pts / len(pts)  # area * mean(x x^T)
    assert np.abs(mc - UNIT_TRIANGLE_SIGMA).max() < 5e-3 * np.abs(UNIT_TRIANGLE_SIGMA).max()


def test_sphere_covariance_analytic():
    # uniform measure on a radius-r sphere has covariance (r^2 / 3) I
    mesh = shapes.icosphere(4, radius=2.0)
    area, centroid, cov = pm.mesh_surface_stats(mesh)
    assert np.abs(centroid).max() < 1e-12
    assert np.abs(cov - (4.0 / 3.0) * np.eye(3)).max() < 0.005 * (4.0 / 3.0)
    assert area == pytest.approx(4 * np.pi * 4.0, rel=0.01)


def test_stats_invariant_under_permutation(rng):
    mesh = shapes.irregular_tetrahedron()
    area0, c0, cov0 = pm.mesh_surface_stats(mesh)
    perm = rng.permutation(len(mesh.triangles))
    shuffled = pm.TriangleMesh(mesh.vertices, mesh.triangles[perm], mesh.weights[perm])
    area1, c1, cov1 = pm.mesh_surface_stats(shuffled)
    assert abs(area0 - area1) < 1e-12
    assert np.abs(c0 - c1).max() < 1e-12
    assert np.abs(cov0 - cov1).max() < 1e-12
    # vertex reordering with remapped indices
    vperm = rng.permutation(len(mesh.vertices))
    inverse = np.argsort(vperm)
    remapped = pm.TriangleMesh(mesh.vertices[vperm], inverse[mesh.triangles], mesh.weights)
    area2, c2, cov2 = pm.mesh_surface_stats(remapped)
    assert abs(area0 - area2) < 1e-12 and np.abs(cov0 - cov2).max() < 1e-12


def test_stats_transform_covariance(rng):
    mesh = shapes.cyclic_fins(3)
    area0, c0, cov0 = pm.mesh_surface_stats(mesh)
    rt = pm.RigidTransform(pm.random_rotation(rng), rng.normal(size=3))
    area1, c1, cov1 = pm.mesh_surface_stats(mesh.transformed(rt))
    assert abs(area0 - area1) < 1e-9
    assert np.abs(c1 - rt.apply(c0)).max() < 1e-9
    assert np.abs(cov1 - rt.rotation @ cov0 @ rt.rotation.T).max() < 1e-9


def test_degenerate_mesh_rejected():
    with pytest.raises(pm.DegenerateMeshError):
        pm.TriangleMesh([[0, 0, 0], [1, 0, 0], [2, 0, 0]], [[0, 1, 2]])


def test_triangle_index_out_of_range():
    with pytest.raises(ValueError):
        pm.TriangleMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 3]])


def test_weight_doubles_as_duplication():
    v = shapes.irregular_tetrahedron().vertices
    t = shapes.irregular_tetrahedron().triangles
    weighted = pm.TriangleMesh(v, t, np.array([2.0, 1.0, 1.0, 1.0]))
    duplicated = pm.TriangleMesh(v, np.vstack([t, t[:1]]))
    for a, b in zip(pm.mesh_surface_stats(weighted), pm.mesh_surface_stats(duplicated)):
        assert np.abs(np.asarray(a) - np.asarray(b)).max() < 1e-12


UNIT_SEGMENT = pm.Polyline2D([[0.0, 0.0], [1.0, 0.0]], [[0, 1]])


def test_unit_segment_stats():
    length, centroid, cov = pm.polyline_stats(UNIT_SEGMENT)
    assert length == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(centroid, [0.5, 0.0], atol=1e-15)
    # centered second moment of a unit segment: 1/3 - 1/4 = 1/12
    assert cov[0, 0] == pytest.approx(1 / 12, abs=1e-15)
    assert abs(cov[0, 1]) < 1e-15 and abs(cov[1, 1]) < 1e-15


def test_segment_second_moment_monte_carlo_oracle():
    rng = np.random.default_rng(7)
    pts = pm.sample_polyline(UNIT_SEGMENT, 200_000, rng)
    mc = pts.T @ pts / len(pts)
    assert abs(mc[0, 0] - 1 / 3) < 2e-3


def test_polyline_transform_covariance(rng):
    poly = shapes.cyclic_star_outline(4)
    _, c0, cov0 = pm.polyline_stats(poly)
    rt = pm.RigidTransform(pm.rotation_2d(0.8), np.array([2.0, -1.0]))
    _, c1, cov1 = pm.polyline_stats(poly.transformed(rt))
    assert np.abs(c1 - rt.apply(c0)).max() < 1e-9
    assert np.abs(cov1 - rt.rotation @ cov0 @ rt.rotation.T).max() < 1e-9


class TestLoadObj:
    def test_triangles_and_fans(self, tmp_path):
        path = tmp_path / "quad.obj"
        path.write_text(
            "# comment\n"
            "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
            "f 1 2 3 4\n"
        )
        mesh = pm.load_obj(path)
        assert isinstance(mesh, pm.TriangleMesh)
        assert len(mesh.triangles) == 2  # fan-triangulated quad
        area, _, _ = pm.mesh_surface_stats(mesh)
        assert area == pytest.approx(1.0, abs=1e-15)

    def test_slash_and_negative_indices(self, tmp_path):
        path = tmp_path / "tri.obj"
        path.write_text(
            "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
            "f 1/1/1 2/2/2 -1/3/3\n"
        )
        mesh = pm.load_obj(path)
        assert np.array_equal(mesh.triangles, [[0, 1, 2]])

    def test_line_only_becomes_polyline(self, tmp_path):
        path = tmp_path / "poly.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nl 1 2 3 1\n")
        poly = pm.load_obj(path)
        assert isinstance(poly, pm.Polyline2D)
        assert len(poly.segments) == 3

    def test_line_with_nonzero_z_rejected(self, tmp_path):
        path = tmp_path / "bad.obj"
        path.write_text("v 0 0 0\nv 1 0 1\nl 1 2\n")
        with pytest.raises(ValueError):
            pm.load_obj(path)

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "empty.obj"
        path.write_text("# nothing\n")
        with pytest.raises(ValueError):
            pm.load_obj(path)
