"""Rotation and rigid-transformation primitives shared by the rest of the package.

Rotations are stored as matrices; quaternions appear only at I/O boundaries
(vote files, model files). 2D rotations use 2x2 matrices built from an angle.
"""
from __future__ import annotations

import numpy as np

# Orthonormality drift policy: small drift is repaired by polar decomposition,
# large drift is rejected as garbage input.
DRIFT_FIX = 1e-6
DRIFT_REJECT = 1e-3


def orthonormalize(matrix: np.ndarray) -> np.ndarray:
    """Nearest orthogonal matrix (polar decomposition via SVD)."""
    u, _, vt = np.linalg.svd(np.asarray(matrix, dtype=float))
    return u @ vt


def check_rotation(matrix) -> np.ndarray:
    """Validate a rotation matrix, repairing small orthonormality drift.

    Drift (Frobenius deviation of R^T R from identity) above ``DRIFT_FIX`` is
    repaired by polar decomposition; above ``DRIFT_REJECT`` the matrix is
    rejected. Improper rotations (det <= 0) are always rejected.
    """
    m = np.array(matrix, dtype=float)
    if m.shape not in ((2, 2), (3, 3)):
        raise ValueError(f"rotation matrix must be 2x2 or 3x3, got shape {m.shape}")
    drift = np.linalg.norm(m.T @ m - np.eye(m.shape[0]))
    if drift > DRIFT_REJECT:
        raise ValueError(f"matrix is not orthonormal (drift {drift:.3e})")
    if np.linalg.det(m) <= 0.0:
        raise ValueError("matrix is not a proper rotation (det <= 0)")
    if drift > DRIFT_FIX:
        m = orthonormalize(m)
    return m


def quat_to_matrix(q) -> np.ndarray:
    """Rotation matrix of a unit quaternion (w, x, y, z).

    The quaternion is renormalized internally; q and -q yield bitwise equal
    matrices (every term is quadratic in the components).
    """
    q = np.asarray(q, dtype=float).reshape(-1)
    if q.shape[0] != 4:
        raise ValueError("quaternion must have 4 components (w, x, y, z)")
    n = np.linalg.norm(q)
    if n < 1e-12:
        raise ValueError("zero quaternion does not define a rotation")
    w, x, y, z = q / n
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def matrix_to_quat(matrix) -> np.ndarray:
    """Unit quaternion (w, x, y, z) of a rotation matrix, with w >= 0."""
    m = check_rotation(matrix)
    if m.shape != (3, 3):
        raise ValueError("quaternion conversion requires a 3x3 rotation")
    t = np.trace(m)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2
        q = np.array(
            [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
        )
    else:
        i = int(np.argmax(np.diag(m)))
        if i == 0:
            s = np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2
            q = np.array(
                [(m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s]
            )
        elif i == 1:
            s = np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2
            q = np.array(
                [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s]
            )
        else:
            s = np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2
            q = np.array(
                [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s]
            )
    q /= np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    return q


def rotation_about_axis(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix for a unit axis and an angle in radians."""
    a = np.asarray(axis, dtype=float).reshape(-1)
    if a.shape[0] != 3:
        raise ValueError("axis must be a 3-vector")
    n = np.linalg.norm(a)
    if n < 1e-12:
        raise ValueError("zero axis does not define a rotation")
    a = a / n
    k = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def rotation_2d(angle: float) -> np.ndarray:
    """2x2 rotation matrix for an angle in radians."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def relative_rotation_angle(r1, r2) -> float:
    """Angle in [0, pi] of the relative rotation between two rotations.

    Uses the trace identity (3D: trace = 2 cos(angle) + 1); invariant under
    simultaneous left-composition of both inputs with any rotation.
    """
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    t = np.trace(r1.T @ r2)
    if r1.shape[0] == 3:
        c = (t - 1.0) / 2.0
    else:
        c = t / 2.0
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def rotation_between(a, b) -> np.ndarray:
    """Minimal rotation taking unit vector ``a`` onto unit vector ``b``."""
    a = np.asarray(a, dtype=float) / np.linalg.norm(a)
    b = np.asarray(b, dtype=float) / np.linalg.norm(b)
    v = np.cross(a, b)
    s = np.linalg.norm(v)
    c = float(np.dot(a, b))
    if s < 1e-12:
        if c > 0:
            return np.eye(3)
        # antiparallel: half turn about any axis orthogonal to a
        helper = np.array([1.0, 0.0, 0.0]) if abs(a[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        axis = np.cross(a, helper)
        return rotation_about_axis(axis, np.pi)
    return rotation_about_axis(v, np.arctan2(s, c))


def random_rotation(rng: np.random.Generator, dim: int = 3) -> np.ndarray:
    """Uniformly distributed random rotation (3D via random unit quaternion)."""
    if dim == 2:
        return rotation_2d(rng.uniform(0.0, 2.0 * np.pi))
    q = rng.normal(size=4)
    return quat_to_matrix(q)


class RigidTransform:
    """A rigid transformation x -> R x + t in 2 or 3 dimensions.

    Values are immutable after construction (arrays are read-only) and safe to
    share between threads. Under an object model with proper symmetries, a
    RigidTransform also serves as the stored member of a pose equivalence
    class; pose equality is model-dependent (distance zero), never bitwise.
    """

    __slots__ = ("rotation", "translation")

    def __init__(self, rotation, translation):
        r = check_rotation(rotation)
        t = np.array(translation, dtype=float).reshape(-1)
        if t.shape[0] != r.shape[0]:
            raise ValueError(
                f"translation dimension {t.shape[0]} does not match rotation {r.shape[0]}"
            )
        r.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    def __setattr__(self, name, value):
        raise AttributeError("RigidTransform is immutable")

    @classmethod
    def identity(cls, dim: int = 3) -> "RigidTransform":
        return cls(np.eye(dim), np.zeros(dim))

    @classmethod
    def from_quaternion(cls, q, translation) -> "RigidTransform":
        return cls(quat_to_matrix(q), translation)

    @classmethod
    def from_angle(cls, angle: float, translation) -> "RigidTransform":
        return cls(rotation_2d(angle), translation)

    @property
    def dim(self) -> int:
        return self.rotation.shape[0]

    @property
    def angle(self) -> float:
        """Rotation angle of a 2D transform."""
        if self.dim != 2:
            raise ValueError("angle is defined for 2D transforms only")
        return float(np.arctan2(self.rotation[1, 0], self.rotation[0, 0]))

    @property
    def quaternion(self) -> np.ndarray:
        return matrix_to_quat(self.rotation)

    def apply(self, points) -> np.ndarray:
        """Transform one point or an (n, dim) batch of points."""
        p = np.asarray(points, dtype=float)
        return p @ self.rotation.T + self.translation

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Composition self o other: (self.compose(other))(x) = self(other(x))."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> "RigidTransform":
        return RigidTransform(self.rotation.T, -self.rotation.T @ self.translation)

    def __repr__(self) -> str:
        return f"RigidTransform(dim={self.dim}, t={np.array2string(self.translation, precision=4)})"
