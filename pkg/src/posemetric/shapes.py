"""Synthetic meshes and polylines with exact symmetry, for tests and demos.

The rotational shapes are built so their declared symmetry holds exactly in
the mesh: n-fold shapes replicate one wedge n times, prisms/cones use regular
cross sections (their radial covariance is exactly isotropic).
"""
from __future__ import annotations

import numpy as np

from .geom import rotation_about_axis, rotation_2d
from .mesh import Polyline2D, TriangleMesh


def icosphere(subdivisions: int = 3, radius: float = 1.0) -> TriangleMesh:
    """Subdivided icosahedron projected onto a sphere."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [np.array(v, dtype=float) for v in verts]
    verts = [v / np.linalg.norm(v) for v in verts]

    for _ in range(subdivisions):
        midpoint_cache: dict[tuple[int, int], int] = {}

        def midpoint(i: int, j: int) -> int:
            key = (min(i, j), max(i, j))
            if key not in midpoint_cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                midpoint_cache[key] = len(verts) - 1
            return midpoint_cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces

    return TriangleMesh(radius * np.stack(verts), np.array(faces, dtype=int))


def cylinder(sides: int = 72, radius: float = 1.0, height: float = 2.0) -> TriangleMesh:
    """Capped prism with a regular cross section (revolution + rotoreflection)."""
    angles = 2.0 * np.pi * np.arange(sides) / sides
    ring = np.stack([radius * np.cos(angles), radius * np.sin(angles)], axis=1)
    top = np.column_stack([ring, np.full(sides, height / 2.0)])
    bottom = np.column_stack([ring, np.full(sides, -height / 2.0)])
    verts = [top, bottom, [[0.0, 0.0, height / 2.0]], [[0.0, 0.0, -height / 2.0]]]
    verts = np.concatenate([np.asarray(v, dtype=float) for v in verts])
    ctop, cbot = 2 * sides, 2 * sides + 1
    faces = []
    for i in range(sides):
        j = (i + 1) % sides
        faces += [(i, sides + i, sides + j), (i, sides + j, j)]  # wall
        faces.append((ctop, i, j))  # top cap
        faces.append((cbot, sides + j, sides + i))  # bottom cap
    return TriangleMesh(verts, np.array(faces, dtype=int))


def cone(sides: int = 72, radius: float = 1.0, height: float = 2.0) -> TriangleMesh:
    """Capped cone, apex up (revolution without rotoreflection invariance)."""
    angles = 2.0 * np.pi * np.arange(sides) / sides
    ring = np.column_stack(
        [radius * np.cos(angles), radius * np.sin(angles), np.zeros(sides)]
    )
    verts = np.concatenate([ring, [[0.0, 0.0, height]], [[0.0, 0.0, 0.0]]])
    apex, cbot = sides, sides + 1
    faces = []
    for i in range(sides):
        j = (i + 1) % sides
        faces.append((apex, i, j))
        faces.append((cbot, j, i))
    return TriangleMesh(verts, np.array(faces, dtype=int))


def cyclic_fins(order: int = 3, inner: float = 0.2, outer: float = 1.0, height: float = 1.5) -> TriangleMesh:
    """n triangular fins replicated about e_z: exact cyclic symmetry of the order.

    Each fin is a right triangle in its radial plane (wide at the bottom only),
    so the shape has no rotoreflection invariance and its full proper symmetry
    group is exactly the cyclic group.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    fin = np.array(
        [
            [inner, 0.0, -height / 2.0],
            [outer, 0.0, -height / 2.0],
            [inner, 0.0, height / 2.0],
        ]
    )
    verts = []
    faces = []
    for k in range(order):
        rot = rotation_about_axis([0.0, 0.0, 1.0], 2.0 * np.pi * k / order)
        base = 3 * k
        verts.append(fin @ rot.T)
        faces.append((base, base + 1, base + 2))
    return TriangleMesh(np.concatenate(verts), np.array(faces, dtype=int))


def irregular_tetrahedron(scale: float = 1.0) -> TriangleMesh:
    """Scalene tetrahedron: no proper symmetry, distinct principal moments."""
    v = scale * np.array(
        [
            [0.0, 0.0, 0.0],
            [1.9, 0.0, 0.0],
            [0.3, 1.1, 0.0],
            [0.2, 0.3, 0.7],
        ]
    )
    f = np.array([[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]])
    return TriangleMesh(v, f)


def polygon_outline(sides: int, radius: float = 1.0) -> Polyline2D:
    """Closed regular polygon outline (exact cyclic symmetry of order ``sides``)."""
    angles = 2.0 * np.pi * np.arange(sides) / sides
    verts = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    segs = np.column_stack([np.arange(sides), (np.arange(sides) + 1) % sides])
    return Polyline2D(verts, segs)


def rectangle_outline(width: float = 2.0, height: float = 1.0) -> Polyline2D:
    """Closed rectangle outline (cyclic symmetry of order 2)."""
    w, h = width / 2.0, height / 2.0
    verts = np.array([[-w, -h], [w, -h], [w, h], [-w, h]])
    segs = np.array([[0, 1], [1, 2], [2, 3], [3, 0]])
    return Polyline2D(verts, segs)


def scalene_triangle_outline(scale: float = 1.0) -> Polyline2D:
    """Closed scalene triangle outline (no proper 2D symmetry)."""
    verts = scale * np.array([[0.0, 0.0], [2.1, 0.2], [0.4, 1.3]])
    segs = np.array([[0, 1], [1, 2], [2, 0]])
    return Polyline2D(verts, segs)


def cyclic_star_outline(order: int = 4, inner: float = 0.4, outer: float = 1.0) -> Polyline2D:
    """n-pointed asymmetric star outline (exact cyclic symmetry of the order).

    Each wedge is a two-segment spike with unequal flanks, so the shape has no
    reflection-compatible proper symmetry beyond the cyclic rotations.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    verts = []
    segs = []
    for k in range(order):
        rot = rotation_2d(2.0 * np.pi * k / order)
        a = rot @ np.array([inner, 0.0])
        b = rot @ np.array([outer * np.cos(0.7 * np.pi / order), outer * np.sin(0.7 * np.pi / order)])
        base = 2 * k
        verts += [a, b]
        segs.append((base, base + 1))
        segs.append((base + 1, (base + 2) % (2 * order)))
    return Polyline2D(np.stack(verts), np.array(segs, dtype=int))
