"""Shared fixtures: analytic models per symmetry class and mesh-backed cases."""
from __future__ import annotations

import numpy as np
import pytest

import posemetric as pm
from posemetric import shapes

C3_GROUP = [
    np.eye(3),
    pm.rotation_about_axis([0, 0, 1], 2 * np.pi / 3),
    pm.rotation_about_axis([0, 0, 1], -2 * np.pi / 3),
]

ALL_CLASSES = [
    "spherical",
    "revolution",
    "revolution-rotoreflection",
    "none3d",
    "finite-c3",
    "circular2d",
    "none2d",
    "cyclic4",
    "cyclic2",
]

THREE_D_CLASSES = ALL_CLASSES[:5]


def make_model(key: str) -> pm.ObjectModel:
    """Analytic object model with fixed geometry scalars."""
    if key == "spherical":
        return pm.ObjectModel(pm.SymmetryClass.SPHERICAL, 0.6 * np.eye(3))
    if key == "revolution":
        return pm.ObjectModel(pm.SymmetryClass.REVOLUTION, np.diag([0.5, 0.5, 0.8]))
    if key == "revolution-rotoreflection":
        return pm.ObjectModel(
            pm.SymmetryClass.REVOLUTION_ROTOREFLECTION, np.diag([0.5, 0.5, 0.8])
        )
    if key == "none3d":
        return pm.ObjectModel(pm.SymmetryClass.NONE_3D, np.diag([0.9, 0.5, 0.3]))
    if key == "finite-c3":
        return pm.ObjectModel(pm.SymmetryClass.FINITE, np.diag([0.5, 0.5, 0.8]), group=C3_GROUP)
    if key == "circular2d":
        return pm.ObjectModel(pm.SymmetryClass.CIRCULAR_2D, 0.7 * np.eye(2))
    if key == "none2d":
        return pm.ObjectModel(pm.SymmetryClass.NONE_2D, np.diag([0.8, 0.4]))
    if key == "cyclic4":
        return pm.ObjectModel(pm.SymmetryClass.CYCLIC_2D, 0.6 * np.eye(2), cyclic_order=4)
    if key == "cyclic2":
        return pm.ObjectModel(pm.SymmetryClass.CYCLIC_2D, np.diag([0.8, 0.4]), cyclic_order=2)
    raise KeyError(key)


def random_pose(model: pm.ObjectModel, rng: np.random.Generator, tscale: float = 1.0) -> pm.Pose:
    d = model.dimension
    return pm.Pose(pm.random_rotation(rng, d), tscale * rng.normal(size=d))


_MESH_CASES: dict[str, tuple] = {}


def mesh_case(key: str):
    """(model, canonical mesh) pairs built once per session.

    Every mesh carries its declared symmetry exactly (wedge replication /
    regular cross sections), so the integral oracle is valid for it.
    """
    if key not in _MESH_CASES:
        if key == "spherical":
            raw = shapes.icosphere(3, 1.0)
            model, tf = pm.canonicalize_frame(raw, pm.SymmetryClass.SPHERICAL)
        elif key == "revolution":
            raw = shapes.cone(72, 1.0, 2.0)
            model, tf = pm.canonicalize_frame(raw, pm.SymmetryClass.REVOLUTION, axis=[0, 0, 1])
        elif key == "revolution-rotoreflection":
            raw = shapes.cylinder(72, 1.0, 2.0)
            model, tf = pm.canonicalize_frame(
                raw, pm.SymmetryClass.REVOLUTION_ROTOREFLECTION, axis=[0, 0, 1]
            )
        elif key == "none3d":
            raw = shapes.irregular_tetrahedron()
            model, tf = pm.canonicalize_frame(raw, pm.SymmetryClass.NONE_3D)
        elif key == "finite-c3":
            raw = shapes.cyclic_fins(3)
            model, tf = pm.canonicalize_frame(raw, pm.SymmetryClass.FINITE, group=C3_GROUP)
        elif key == "circular2d":
            raw = shapes.polygon_outline(360, 1.0)
            model, tf = pm.canonicalize_frame(raw, pm.SymmetryClass.CIRCULAR_2D)
        elif key == "none2d":
            raw = shapes.scalene_triangle_outline()
            model, tf = pm.canonicalize_frame(raw, pm.SymmetryClass.NONE_2D)
        elif key == "cyclic4":
            raw = shapes.cyclic_star_outline(4)
            model, tf = pm.canonicalize_frame(raw, pm.SymmetryClass.CYCLIC_2D, cyclic_order=4)
        elif key == "cyclic2":
            raw = shapes.rectangle_outline(2.0, 1.0)
            model, tf = pm.canonicalize_frame(raw, pm.SymmetryClass.CYCLIC_2D, cyclic_order=2)
        else:
            raise KeyError(key)
        _MESH_CASES[key] = (model, raw.transformed(tf))
    return _MESH_CASES[key]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
