"""Triangle meshes, 2D polylines, surface statistics and OBJ input.

Surface area, centroid and covariance of a triangle soup are computed exactly
from per-triangle closed forms (cross-product area, vertex-mean centroid and
the 12-point second-moment rule); an optional per-triangle density weight
scales each triangle's contribution. 2D objects use polyline "meshes"
(segment soups) with the analogous per-segment closed forms.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateMeshError
from .geom import RigidTransform


class TriangleMesh:
    """Immutable triangle soup: vertices (V, 3), triangles (F, 3) vertex indices.

    ``weights`` is an optional per-triangle density (dimensionless, default 1).
    No manifoldness is required; at least one triangle must have nonzero area.
    """

    def __init__(self, vertices, triangles, weights=None):
        v = np.array(vertices, dtype=float)
        t = np.array(triangles, dtype=int)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("vertices must be an (n, 3) array")
        if t.ndim != 2 or t.shape[1] != 3:
            raise ValueError("triangles must be an (m, 3) index array")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise ValueError("triangle indices out of range")
        if weights is None:
            w = np.ones(len(t))
        else:
            w = np.array(weights, dtype=float)
            if w.shape != (len(t),):
                raise ValueError("weights must have one entry per triangle")
            if np.any(w < 0):
                raise ValueError("weights must be nonnegative")
        a, b, c = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
        areas = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)
        if not np.any(areas * w > 0):
            raise DegenerateMeshError("mesh has zero total weighted area")
        for arr in (v, t, w, areas):
            arr.setflags(write=False)
        self.vertices = v
        self.triangles = t
        self.weights = w
        self._areas = areas

    def transformed(self, rt: RigidTransform) -> "TriangleMesh":
        """Copy of the mesh with all vertices rigidly transformed."""
        return TriangleMesh(rt.apply(self.vertices), self.triangles, self.weights)

    @property
    def corners(self):
        t = self.triangles
        return self.vertices[t[:, 0]], self.vertices[t[:, 1]], self.vertices[t[:, 2]]


class Polyline2D:
    """Immutable 2D segment soup: vertices (V, 2), segments (E, 2) indices."""

    def __init__(self, vertices, segments, weights=None):
        v = np.array(vertices, dtype=float)
        s = np.array(segments, dtype=int)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError("vertices must be an (n, 2) array")
        if s.ndim != 2 or s.shape[1] != 2:
            raise ValueError("segments must be an (m, 2) index array")
        if s.size and (s.min() < 0 or s.max() >= len(v)):
            raise ValueError("segment indices out of range")
        if weights is None:
            w = np.ones(len(s))
        else:
            w = np.array(weights, dtype=float)
            if w.shape != (len(s),):
                raise ValueError("weights must have one entry per segment")
            if np.any(w < 0):
                raise ValueError("weights must be nonnegative")
        lengths = np.linalg.norm(v[s[:, 1]] - v[s[:, 0]], axis=1)
        if not np.any(lengths * w > 0):
            raise DegenerateMeshError("polyline has zero total weighted length")
        for arr in (v, s, w, lengths):
            arr.setflags(write=False)
        self.vertices = v
        self.segments = s
        self.weights = w
        self._lengths = lengths

    def transformed(self, rt: RigidTransform) -> "Polyline2D":
        return Polyline2D(rt.apply(self.vertices), self.segments, self.weights)


def mesh_surface_stats(mesh: TriangleMesh):
    """Weighted area, centroid and centered covariance of a mesh surface.

    Returns ``(area, centroid, covariance)`` where covariance is the second
    moment of the weighted surface about its own centroid (the per-triangle
    closed form assumes the centroid at the origin, so the raw second moment
    is recentered here).
    """
    a, b, c = mesh.corners
    coeff = mesh.weights * mesh._areas
    total = float(coeff.sum())
    if total <= 0.0:
        raise DegenerateMeshError("mesh has zero total weighted area")
    tri_centroids = (a + b + c) / 3.0
    centroid = coeff @ tri_centroids / total
    k = coeff / 12.0
    second = (
        9.0 * np.einsum("f,fi,fj->ij", k, tri_centroids, tri_centroids)
        + np.einsum("f,fi,fj->ij", k, a, a)
        + np.einsum("f,fi,fj->ij", k, b, b)
        + np.einsum("f,fi,fj->ij", k, c, c)
    )
    cov = second / total - np.outer(centroid, centroid)
    cov = 0.5 * (cov + cov.T)
    return total, centroid, cov


def polyline_stats(poly: Polyline2D):
    """Weighted length, centroid and centered covariance of a 2D polyline."""
    v, s = poly.vertices, poly.segments
    a, b = v[s[:, 0]], v[s[:, 1]]
    coeff = poly.weights * poly._lengths
    total = float(coeff.sum())
    if total <= 0.0:
        raise DegenerateMeshError("polyline has zero total weighted length")
    centroid = coeff @ ((a + b) / 2.0) / total
    k = coeff / 6.0
    second = (
        2.0 * np.einsum("f,fi,fj->ij", k, a, a)
        + np.einsum("f,fi,fj->ij", k, a, b)
        + np.einsum("f,fi,fj->ij", k, b, a)
        + 2.0 * np.einsum("f,fi,fj->ij", k, b, b)
    )
    cov = second / total - np.outer(centroid, centroid)
    cov = 0.5 * (cov + cov.T)
    return total, centroid, cov


def sample_surface(mesh: TriangleMesh, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n points on the mesh, density proportional to weight * area."""
    if n < 1:
        raise ValueError("sample count must be >= 1")
    coeff = mesh.weights * mesh._areas
    p = coeff / coeff.sum()
    idx = rng.choice(len(p), size=n, p=p)
    a, b, c = mesh.corners
    u = rng.random(n)
    v = rng.random(n)
    flip = u + v > 1.0
    u[flip] = 1.0 - u[flip]
    v[flip] = 1.0 - v[flip]
    return a[idx] + u[:, None] * (b[idx] - a[idx]) + v[:, None] * (c[idx] - a[idx])


def sample_polyline(poly: Polyline2D, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n points on the polyline, density proportional to weight * length."""
    if n < 1:
        raise ValueError("sample count must be >= 1")
    coeff = poly.weights * poly._lengths
    p = coeff / coeff.sum()
    idx = rng.choice(len(p), size=n, p=p)
    v, s = poly.vertices, poly.segments
    a, b = v[s[idx, 0]], v[s[idx, 1]]
    u = rng.random(n)
    return a + u[:, None] * (b - a)


def load_obj(path):
    """Minimal ASCII OBJ reader.

    Supports ``v`` and ``f`` statements (polygons fan-triangulated, no
    materials); an OBJ containing only ``l`` (line) statements is read as a
    2D polyline soup, requiring all z coordinates to be zero.
    """
    vertices = []
    faces = []
    lines = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            parts = raw.split("#", 1)[0].split()
            if not parts:
                continue
            tag = parts[0]
            if tag == "v":
                if len(parts) < 4:
                    raise ValueError(f"malformed vertex line: {raw.strip()!r}")
                vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
            elif tag in ("f", "l"):
                idx = []
                for token in parts[1:]:
                    i = int(token.split("/")[0])
                    idx.append(i - 1 if i > 0 else len(vertices) + i)
                if tag == "f":
                    if len(idx) < 3:
                        raise ValueError(f"face with fewer than 3 vertices: {raw.strip()!r}")
                    for j in range(1, len(idx) - 1):
                        faces.append([idx[0], idx[j], idx[j + 1]])
                else:
                    if len(idx) < 2:
                        raise ValueError(f"line with fewer than 2 vertices: {raw.strip()!r}")
                    for j in range(len(idx) - 1):
                        lines.append([idx[j], idx[j + 1]])
    if not vertices:
        raise ValueError(f"{path}: no vertices found")
    v = np.array(vertices, dtype=float)
    if faces:
        return TriangleMesh(v, np.array(faces, dtype=int))
    if lines:
        span = max(1.0, float(np.abs(v).max()))
        if np.abs(v[:, 2]).max() > 1e-9 * span:
            raise ValueError(f"{path}: line-only OBJ must have z = 0 to be read as 2D")
        return Polyline2D(v[:, :2], np.array(lines, dtype=int))
    raise ValueError(f"{path}: no faces or lines found")
