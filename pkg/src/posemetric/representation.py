"""Euclidean pose representatives, ambient symmetries and projection.

A pose is mapped to one or more points of an ambient space R^N
(N in {2, 3, 4, 6, 12} depending on the symmetry class) so that the pose
distance equals the minimum Euclidean distance between representative sets.
``vec`` is columnwise everywhere (rotational blocks flatten column by column).
"""
from __future__ import annotations

import warnings

import numpy as np

from .errors import NearDegenerateProjectionWarning, ProjectionError
from .geom import RigidTransform, rotation_2d, rotation_between
from .model import ObjectModel, SymmetryClass

# A pose is stored as one canonical rigid transformation; equality of poses is
# model-dependent (distance zero under the object's metric), never bitwise.
Pose = RigidTransform

_EZ = np.array([0.0, 0.0, 1.0])

# Exact-degeneracy thresholds for projection (see ProjectionError call sites).
_AXIS_EPS = 1e-12
_RANK_RTOL = 1e-9


def _vec(m: np.ndarray) -> np.ndarray:
    """Columnwise vectorization of a matrix."""
    return m.T.reshape(-1)


def _pose_angle(pose: Pose) -> float:
    return float(np.arctan2(pose.rotation[1, 0], pose.rotation[0, 0]))


def representatives(model: ObjectModel, pose: Pose) -> np.ndarray:
    """All representatives of a pose, one per row, in deterministic order.

    Order: group-element order for finite classes, (+axis, -axis) for
    rotoreflection invariance, ascending k for cyclic 2D objects.
    """
    if pose.dim != model.dimension:
        raise ValueError(f"pose dimension {pose.dim} does not match model {model.dimension}")
    sym = model.symmetry
    r, t = pose.rotation, pose.translation
    if sym is SymmetryClass.SPHERICAL or sym is SymmetryClass.CIRCULAR_2D:
        return t[None, :].copy()
    if sym is SymmetryClass.REVOLUTION:
        axis = model.lambda_ * r[:, 2]
        return np.concatenate([axis, t])[None, :]
    if sym is SymmetryClass.REVOLUTION_ROTOREFLECTION:
        axis = model.lambda_ * r[:, 2]
        return np.stack([np.concatenate([axis, t]), np.concatenate([-axis, t])])
    if sym is SymmetryClass.NONE_3D:
        return np.concatenate([_vec(r @ model.lambda_matrix), t])[None, :]
    if sym is SymmetryClass.FINITE:
        blocks = np.einsum("ij,kjl->kil", r, model._rot_blocks)
        out = np.empty((len(blocks), 12))
        out[:, :9] = blocks.transpose(0, 2, 1).reshape(len(blocks), 9)
        out[:, 9:] = t
        return out
    # 2D classes with an orientation block
    theta = _pose_angle(pose)
    if sym is SymmetryClass.NONE_2D:
        return np.array([[model.lambda_ * np.cos(theta), model.lambda_ * np.sin(theta), t[0], t[1]]])
    if sym is SymmetryClass.CYCLIC_2D:
        angles = theta + model._cyclic_offsets
        out = np.empty((model.cyclic_order, 4))
        out[:, 0] = model.lambda_ * np.cos(angles)
        out[:, 1] = model.lambda_ * np.sin(angles)
        out[:, 2:] = t
        return out
    raise ValueError(f"unsupported symmetry class {sym}")


def representative(model: ObjectModel, pose: Pose) -> np.ndarray:
    """First representative of a pose (cheap; identity group element)."""
    if pose.dim != model.dimension:
        raise ValueError(f"pose dimension {pose.dim} does not match model {model.dimension}")
    sym = model.symmetry
    r, t = pose.rotation, pose.translation
    if sym is SymmetryClass.SPHERICAL or sym is SymmetryClass.CIRCULAR_2D:
        return t.copy()
    if sym.is_revolution:
        return np.concatenate([model.lambda_ * r[:, 2], t])
    if sym in (SymmetryClass.NONE_3D, SymmetryClass.FINITE):
        return np.concatenate([_vec(r @ model.lambda_matrix), t])
    theta = _pose_angle(pose)
    return np.array([model.lambda_ * np.cos(theta), model.lambda_ * np.sin(theta), t[0], t[1]])


class AmbientSymmetry:
    """A linear, norm-preserving map of the ambient space fixing translations.

    Applying the full set of ambient symmetries to any one representative of a
    pose reproduces the pose's whole representative set.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=float)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("AmbientSymmetry is immutable")

    def __call__(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float)

    def __repr__(self) -> str:
        return f"AmbientSymmetry(dim={self.matrix.shape[0]})"


def ambient_symmetries(model: ObjectModel) -> list[AmbientSymmetry]:
    """Symmetry group of the ambient space, of order |R(.)|.

    Finite classes right-multiply the 9-dim rotational block's matrix by a
    group element; rotoreflection flips the sign of the 6-dim axis block;
    cyclic 2D classes rotate the orientation block. The translation block is
    always fixed.
    """
    n = model.ambient_dim
    sym = model.symmetry
    if sym is SymmetryClass.FINITE:
        out = []
        for g in model.group:
            m = np.eye(12)
            m[:9, :9] = np.kron(g.T, np.eye(3))
            out.append(AmbientSymmetry(m))
        return out
    if sym is SymmetryClass.REVOLUTION_ROTOREFLECTION:
        out = []
        for delta in (1.0, -1.0):
            m = np.eye(6)
            m[:3, :3] = delta * np.eye(3)
            out.append(AmbientSymmetry(m))
        return out
    if sym is SymmetryClass.CYCLIC_2D:
        out = []
        for offset in model._cyclic_offsets:
            m = np.eye(4)
            m[:2, :2] = rotation_2d(offset)
            out.append(AmbientSymmetry(m))
        return out
    return [AmbientSymmetry(np.eye(n))]


def project(model: ObjectModel, x) -> Pose:
    """Pose whose representative set is closest to an ambient point.

    Raises :class:`ProjectionError` when the projection is not unique (zero
    axis block for revolution classes; rotational block of rank < 2 for the
    matrix classes). A nearly tied sign-corrected Procrustes solution emits a
    :class:`NearDegenerateProjectionWarning` instead of failing.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != model.ambient_dim:
        raise ValueError(f"expected a {model.ambient_dim}-vector, got {x.shape[0]}")
    sym = model.symmetry
    if sym is SymmetryClass.SPHERICAL:
        return Pose(np.eye(3), x)
    if sym is SymmetryClass.CIRCULAR_2D:
        return Pose(np.eye(2), x)
    if sym.is_revolution:
        xr, xt = x[:3], x[3:]
        norm = float(np.linalg.norm(xr))
        if norm < _AXIS_EPS:
            raise ProjectionError("zero axis block: projection is not unique", residual=norm)
        return Pose(rotation_between(_EZ, xr / norm), xt)
    if sym in (SymmetryClass.NONE_3D, SymmetryClass.FINITE):
        m = x[:9].reshape(3, 3).T  # undo columnwise vec
        u, d, vt = np.linalg.svd(m @ model.lambda_matrix)
        if d[0] <= 0.0 or d[1] < _RANK_RTOL * d[0]:
            raise ProjectionError(
                "rotational block has rank < 2: projection is not unique",
                residual=float(d[1]),
            )
        sign_fix = np.linalg.det(u) * np.linalg.det(vt) < 0
        if sign_fix:
            if d[1] - d[2] < _RANK_RTOL * d[0]:
                warnings.warn(
                    "tied smallest singular values with sign correction: "
                    "projection nearly non-unique",
                    NearDegenerateProjectionWarning,
                    stacklevel=2,
                )
            rot = (u * np.array([1.0, 1.0, -1.0])) @ vt
        else:
            rot = u @ vt
        return Pose(rot, x[9:])
    # 2D orientation-block classes
    a, xt = x[:2], x[2:]
    norm = float(np.linalg.norm(a))
    if norm < _AXIS_EPS:
        raise ProjectionError("zero orientation block: projection is not unique", residual=norm)
    return Pose(rotation_2d(float(np.arctan2(a[1], a[0]))), xt)


def closest_representative(model: ObjectModel, pose: Pose, anchor) -> np.ndarray:
    """Representative of ``pose`` closest to ``anchor`` (ties: first in order)."""
    reps = representatives(model, pose)
    anchor = np.asarray(anchor, dtype=float).reshape(-1)
    idx = int(np.argmin(np.linalg.norm(reps - anchor, axis=1)))
    return reps[idx]
