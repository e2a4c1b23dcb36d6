"""Per-object context: symmetry class, geometry scalars and canonical frame.

An :class:`ObjectModel` bundles everything the metric needs to know about one
rigid object: its proper symmetry class (and finite group, when applicable),
the principal square root of the centered surface covariance, the derived
scalars, and the minimum separation ``T`` between representatives of a single
pose. Models are built from a triangle mesh / 2D polyline via
:func:`canonicalize_frame`, or directly from analytic values.

Symmetry is declared by the caller and then verified against the geometry
(commutation of the covariance root with every declared symmetry); automatic
symmetry detection is out of scope.
"""
from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .errors import NotAGroupError, SymmetryMismatchError
from .geom import (
    RigidTransform,
    check_rotation,
    matrix_to_quat,
    quat_to_matrix,
    rotation_between,
)
from .jsonio import dump_json, load_json
from .mesh import Polyline2D, TriangleMesh, mesh_surface_stats, polyline_stats


class SymmetryClass(Enum):
    """Classification of the proper symmetry groups of a bounded object."""

    SPHERICAL = "spherical"
    REVOLUTION = "revolution"
    REVOLUTION_ROTOREFLECTION = "revolution-rotoreflection"
    NONE_3D = "none"
    FINITE = "finite"
    CIRCULAR_2D = "circular2d"
    NONE_2D = "none2d"
    CYCLIC_2D = "cyclic2d"

    @property
    def dimension(self) -> int:
        if self in (SymmetryClass.CIRCULAR_2D, SymmetryClass.NONE_2D, SymmetryClass.CYCLIC_2D):
            return 2
        return 3

    @property
    def ambient_dim(self) -> int:
        return _AMBIENT_DIM[self]

    @property
    def is_revolution(self) -> bool:
        return self in (SymmetryClass.REVOLUTION, SymmetryClass.REVOLUTION_ROTOREFLECTION)


_AMBIENT_DIM = {
    SymmetryClass.SPHERICAL: 3,
    SymmetryClass.REVOLUTION: 6,
    SymmetryClass.REVOLUTION_ROTOREFLECTION: 6,
    SymmetryClass.NONE_3D: 12,
    SymmetryClass.FINITE: 12,
    SymmetryClass.CIRCULAR_2D: 2,
    SymmetryClass.NONE_2D: 4,
    SymmetryClass.CYCLIC_2D: 4,
}

# Relative Frobenius tolerance for the commutation check G Lambda = Lambda G.
LEMMA1_RTOL = 1e-6


def validate_symmetry_group(elements, tol: float = 1e-9) -> np.ndarray:
    """Deduplicate and verify a finite set of rotations as a group.

    Elements closer than ``tol`` (Frobenius) are merged; the identity is added
    if absent. Closure under products and inverses is checked within ``tol``
    and a violation raises :class:`NotAGroupError` naming the offending pair.
    Returns an (n, 3, 3) stack with the identity first.
    """
    mats = [check_rotation(e) for e in elements]
    if not mats:
        raise ValueError("empty element list")
    dim = mats[0].shape[0]
    group: list[np.ndarray] = [np.eye(dim)]
    for m in mats:
        if m.shape[0] != dim:
            raise ValueError("mixed 2D/3D elements in symmetry group")
        if all(np.linalg.norm(m - g) > tol for g in group):
            group.append(m)

    def find(m) -> int:
        for idx, g in enumerate(group):
            if np.linalg.norm(m - g) <= tol:
                return idx
        return -1

    for i, gi in enumerate(group):
        for j, gj in enumerate(group):
            if find(gi @ gj) < 0:
                raise NotAGroupError(
                    f"closure violation: product of elements {i} and {j} is not in the set"
                )
    for i, gi in enumerate(group):
        if find(gi.T) < 0:
            raise NotAGroupError(f"element {i} has no inverse in the set")
    return np.stack(group)


def sqrt_covariance(cov) -> np.ndarray:
    """Principal (unique PSD) square root of a symmetric PSD matrix.

    The input must be symmetric within 1e-9; eigenvalues in [-1e-12, 0) are
    clamped to zero, smaller ones are rejected as indefinite.
    """
    c = np.asarray(cov, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("covariance must be a square matrix")
    if np.abs(c - c.T).max() > 1e-9:
        raise ValueError("covariance is not symmetric")
    w, v = np.linalg.eigh(0.5 * (c + c.T))
    if w.min() < -1e-12:
        raise ValueError(f"covariance is indefinite (eigenvalue {w.min():.3e})")
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ v.T
    return 0.5 * (root + root.T)


class ObjectModel:
    """Immutable per-object context for all pose-space operations.

    Built for a canonical object frame: surface centroid at the origin and,
    for revolution classes, the revolution axis along e_z. ``lambda_matrix``
    is the principal square root of the centered surface covariance; the
    scalars ``lambda_r``, ``lambda_z`` and ``lambda_`` are set for the classes
    that use them. ``T`` (minimum distance between distinct representatives of
    one pose) is computed lazily and is +inf for single-representative classes.
    """

    def __init__(
        self,
        symmetry: SymmetryClass,
        lambda_matrix,
        *,
        group=None,
        cyclic_order: int | None = None,
        surface_area: float = 0.0,
        canonical_transform: RigidTransform | None = None,
    ):
        self.symmetry = symmetry
        self.dimension = symmetry.dimension
        self.ambient_dim = symmetry.ambient_dim

        lam = np.array(lambda_matrix, dtype=float)
        if lam.shape != (self.dimension, self.dimension):
            raise ValueError(
                f"lambda_matrix must be {self.dimension}x{self.dimension} for {symmetry.value}"
            )
        if np.abs(lam - lam.T).max() > 1e-9 * max(1.0, np.abs(lam).max()):
            raise ValueError("lambda_matrix must be symmetric")
        if np.linalg.eigvalsh(lam).min() < -1e-9 * max(1.0, np.abs(lam).max()):
            raise ValueError("lambda_matrix must be positive semi-definite")
        lam.setflags(write=False)
        self.lambda_matrix = lam
        self.surface_area = float(surface_area)

        self.lambda_r = None
        self.lambda_z = None
        self.lambda_ = None
        self.group = None
        self.cyclic_order = None

        scale = max(np.abs(lam).max(), np.finfo(float).tiny)
        if symmetry.is_revolution:
            off = lam.copy()
            off[0, 0] = off[1, 1] = off[2, 2] = 0.0
            if abs(lam[0, 0] - lam[1, 1]) > LEMMA1_RTOL * scale or np.abs(off).max() > LEMMA1_RTOL * scale:
                raise SymmetryMismatchError(
                    "revolution model requires lambda_matrix = diag(lambda_r, lambda_r, lambda_z)"
                )
            self.lambda_r = float(0.5 * (lam[0, 0] + lam[1, 1]))
            self.lambda_z = float(lam[2, 2])
            self.lambda_ = math.hypot(self.lambda_r, self.lambda_z)
        elif symmetry is SymmetryClass.SPHERICAL:
            if np.abs(lam - lam[0, 0] * np.eye(3)).max() > LEMMA1_RTOL * scale:
                raise SymmetryMismatchError("spherical model requires isotropic lambda_matrix")
        elif symmetry is SymmetryClass.FINITE:
            if group is None:
                raise ValueError("finite symmetry class requires a group")
            g = validate_symmetry_group(group)
            if g.shape[1] != 3:
                raise ValueError("finite 3D group must contain 3x3 rotations")
            if len(g) < 2:
                raise ValueError(
                    "finite group is trivial; use SymmetryClass.NONE_3D for asymmetric objects"
                )
            lam_norm = max(np.linalg.norm(lam), np.finfo(float).tiny)
            for k, gk in enumerate(g):
                residual = np.linalg.norm(gk @ lam - lam @ gk) / lam_norm
                if residual > LEMMA1_RTOL:
                    raise SymmetryMismatchError(
                        f"group element {k} does not commute with lambda_matrix "
                        f"(relative residual {residual:.3e})"
                    )
            g.setflags(write=False)
            self.group = g
        elif symmetry is SymmetryClass.CYCLIC_2D:
            if cyclic_order is None or int(cyclic_order) < 2:
                raise ValueError("cyclic 2D symmetry requires an order n >= 2")
            self.cyclic_order = int(cyclic_order)
            if self.cyclic_order >= 3:
                if np.abs(lam - lam[0, 0] * np.eye(2)).max() > LEMMA1_RTOL * scale:
                    raise SymmetryMismatchError(
                        "cyclic order >= 3 requires isotropic lambda_matrix"
                    )
        elif symmetry is SymmetryClass.CIRCULAR_2D:
            if np.abs(lam - lam[0, 0] * np.eye(2)).max() > LEMMA1_RTOL * scale:
                raise SymmetryMismatchError("circular model requires isotropic lambda_matrix")

        if self.dimension == 2:
            self.lambda_ = float(np.sqrt(np.trace(lam @ lam)))

        self.canonical_transform = (
            canonical_transform
            if canonical_transform is not None
            else RigidTransform.identity(self.dimension)
        )
        if self.canonical_transform.dim != self.dimension:
            raise ValueError("canonical_transform dimension mismatch")

        # Per-pose representative count |R(.)|.
        if symmetry is SymmetryClass.FINITE:
            self.rep_count = len(self.group)
        elif symmetry is SymmetryClass.REVOLUTION_ROTOREFLECTION:
            self.rep_count = 2
        elif symmetry is SymmetryClass.CYCLIC_2D:
            self.rep_count = self.cyclic_order
        else:
            self.rep_count = 1

        # Precomputed rotational blocks used by fast representative evaluation.
        if symmetry is SymmetryClass.FINITE:
            self._rot_blocks = np.stack([gk @ lam for gk in self.group])
        elif symmetry is SymmetryClass.CYCLIC_2D:
            self._cyclic_offsets = 2.0 * np.pi * np.arange(self.cyclic_order) / self.cyclic_order
        self._t_cache = None

    @property
    def lambda_min(self) -> float:
        """Smallest eigenvalue of the covariance root."""
        return float(np.linalg.eigvalsh(self.lambda_matrix).min())

    @property
    def lambda_fro(self) -> float:
        """Frobenius norm of the covariance root (norm of a rotational block)."""
        return float(np.linalg.norm(self.lambda_matrix))

    @property
    def T(self) -> float:
        if self._t_cache is None:
            self._t_cache = min_representative_separation(self)
        return self._t_cache

    def reference_pose(self) -> RigidTransform:
        return RigidTransform.identity(self.dimension)

    def symmetry_elements(self, steps: int = 360) -> np.ndarray:
        """Stack of proper-symmetry rotations; continuous groups discretized.

        ``steps`` rotations about the revolution axis are used for revolution
        classes (doubled by the flip for rotoreflection invariance). Spherical
        and circular groups have no finite discretization here and raise.
        """
        sym = self.symmetry
        if sym in (SymmetryClass.NONE_3D, SymmetryClass.NONE_2D):
            return np.eye(self.dimension)[None]
        if sym is SymmetryClass.FINITE:
            return self.group
        if sym is SymmetryClass.CYCLIC_2D:
            angles = self._cyclic_offsets
            c, s = np.cos(angles), np.sin(angles)
            out = np.zeros((len(angles), 2, 2))
            out[:, 0, 0] = c
            out[:, 0, 1] = -s
            out[:, 1, 0] = s
            out[:, 1, 1] = c
            return out
        if sym.is_revolution:
            angles = 2.0 * np.pi * np.arange(steps) / steps
            c, s = np.cos(angles), np.sin(angles)
            rz = np.zeros((steps, 3, 3))
            rz[:, 0, 0] = c
            rz[:, 0, 1] = -s
            rz[:, 1, 0] = s
            rz[:, 1, 1] = c
            rz[:, 2, 2] = 1.0
            if sym is SymmetryClass.REVOLUTION:
                return rz
            flip = np.diag([1.0, -1.0, -1.0])  # half turn about e_x
            return np.concatenate([rz, flip[None] @ rz])
        raise ValueError(f"{sym.value} group has no finite discretization")

    def __repr__(self) -> str:
        return f"ObjectModel({self.symmetry.value}, N={self.ambient_dim}, |R|={self.rep_count})"


def min_representative_separation(model: ObjectModel) -> float:
    """Minimum distance between distinct representatives of one pose.

    Evaluated by enumerating the representatives of the reference pose;
    classes with a single representative return +inf by convention.
    """
    from .representation import representatives

    reps = representatives(model, model.reference_pose())
    if len(reps) < 2:
        return math.inf
    scale = max(1.0, float(np.abs(reps).max()))
    best = math.inf
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            d = float(np.linalg.norm(reps[i] - reps[j]))
            if d > 1e-12 * scale:
                best = min(best, d)
    return best


def _detect_revolution_axis(cov: np.ndarray, rtol: float) -> np.ndarray:
    """Axis of revolution from the covariance eigenstructure.

    The radial plane shows a repeated eigenvalue (adjacent after sorting); the
    axis is the remaining eigenvector. Fails when the axis eigenvalue does not
    stand out from the radial pair, e.g. for near-isotropic covariances.
    """
    w, v = np.linalg.eigh(cov)
    # candidate radial pairs are (w0, w1) -> axis 2 and (w1, w2) -> axis 0
    axis_idx = 2 if abs(w[0] - w[1]) <= abs(w[1] - w[2]) else 0
    pair = [i for i in range(3) if i != axis_idx]
    pair_mean = 0.5 * (w[pair[0]] + w[pair[1]])
    if abs(w[axis_idx] - pair_mean) <= rtol * max(w.max(), np.finfo(float).tiny):
        raise SymmetryMismatchError(
            "covariance too isotropic to detect the revolution axis; declare it explicitly"
        )
    return v[:, axis_idx]


def canonicalize_frame(
    mesh,
    symmetry: SymmetryClass,
    *,
    group=None,
    axis=None,
    cyclic_order: int | None = None,
    residual_tol: float = 0.01,
):
    """Build an :class:`ObjectModel` from a mesh, moving it to the canonical frame.

    The origin is moved to the surface centroid. Revolution classes rotate the
    declared (or detected) axis onto e_z; the asymmetric 3D/2D classes rotate
    onto the principal axes of the covariance (descending). The declared
    symmetry is verified against the covariance root within ``residual_tol``
    (relative Frobenius) and the stored root is snapped to its exact symmetric
    form. Returns ``(model, transform)`` where ``transform`` maps original
    mesh coordinates to canonical coordinates.
    """
    if symmetry.dimension == 3:
        if not isinstance(mesh, TriangleMesh):
            raise ValueError(f"{symmetry.value} expects a TriangleMesh")
        area, centroid, cov = mesh_surface_stats(mesh)
    else:
        if not isinstance(mesh, Polyline2D):
            raise ValueError(f"{symmetry.value} expects a Polyline2D")
        area, centroid, cov = polyline_stats(mesh)

    dim = symmetry.dimension
    rotation = np.eye(dim)
    lam_raw = sqrt_covariance(cov)
    lam_norm = max(np.linalg.norm(lam_raw), np.finfo(float).tiny)

    def check_residual(candidate, what):
        residual = np.linalg.norm(lam_raw_c - candidate) / lam_norm
        if residual > residual_tol:
            raise SymmetryMismatchError(
                f"covariance root deviates from {what} by {residual:.2%} (> {residual_tol:.2%})"
            )

    if symmetry.is_revolution:
        direction = np.asarray(axis, dtype=float) if axis is not None else _detect_revolution_axis(cov, residual_tol)
        rotation = rotation_between(direction, np.array([0.0, 0.0, 1.0]))
        lam_raw_c = sqrt_covariance(rotation @ cov @ rotation.T)
        lr = 0.5 * (lam_raw_c[0, 0] + lam_raw_c[1, 1])
        lz = lam_raw_c[2, 2]
        lam = np.diag([lr, lr, lz])
        check_residual(lam, "diag(lambda_r, lambda_r, lambda_z)")
    elif symmetry is SymmetryClass.SPHERICAL:
        lam_raw_c = lam_raw
        iso = np.trace(lam_raw_c) / 3.0
        lam = iso * np.eye(3)
        check_residual(lam, "an isotropic matrix")
    elif symmetry is SymmetryClass.FINITE:
        if group is None:
            raise ValueError("finite symmetry class requires a group")
        g = validate_symmetry_group(group)
        lam_raw_c = lam_raw
        for k, gk in enumerate(g):
            residual = np.linalg.norm(gk @ lam_raw - lam_raw @ gk) / lam_norm
            if residual > residual_tol:
                raise SymmetryMismatchError(
                    f"group element {k} does not commute with the covariance root "
                    f"(relative residual {residual:.2%})"
                )
        # Group-average the covariance so the stored root commutes exactly.
        cov_sym = np.mean([gk @ cov @ gk.T for gk in g], axis=0)
        lam = sqrt_covariance(cov_sym)
        group = g
    elif symmetry in (SymmetryClass.NONE_3D, SymmetryClass.NONE_2D):
        w, v = np.linalg.eigh(cov)
        order = np.argsort(w)[::-1]
        w, v = w[order], v[:, order]
        for k in range(dim):
            if v[np.argmax(np.abs(v[:, k])), k] < 0:
                v[:, k] = -v[:, k]
        if np.linalg.det(v) < 0:
            v[:, -1] = -v[:, -1]
        rotation = v.T
        lam_raw_c = sqrt_covariance(rotation @ cov @ rotation.T)
        lam = np.diag(np.sqrt(np.clip(w, 0.0, None)))
    elif symmetry is SymmetryClass.CIRCULAR_2D:
        lam_raw_c = lam_raw
        iso = np.trace(lam_raw_c) / 2.0
        lam = iso * np.eye(2)
        check_residual(lam, "an isotropic matrix")
    elif symmetry is SymmetryClass.CYCLIC_2D:
        if cyclic_order is None or int(cyclic_order) < 2:
            raise ValueError("cyclic 2D symmetry requires an order n >= 2")
        lam_raw_c = lam_raw
        if int(cyclic_order) >= 3:
            iso = np.trace(lam_raw_c) / 2.0
            lam = iso * np.eye(2)
            check_residual(lam, "an isotropic matrix")
        else:
            lam = lam_raw
    else:
        raise ValueError(f"unsupported symmetry class {symmetry}")

    transform = RigidTransform(rotation, -rotation @ centroid)
    if group is not None and symmetry is SymmetryClass.FINITE and not np.allclose(rotation, np.eye(dim)):
        group = np.stack([rotation @ gk @ rotation.T for gk in group])
    model = ObjectModel(
        symmetry,
        lam,
        group=group if symmetry is SymmetryClass.FINITE else None,
        cyclic_order=cyclic_order,
        surface_area=area,
        canonical_transform=transform,
    )
    return model, transform


def lemma1_residual(model: ObjectModel) -> float:
    """Worst relative commutation residual of the declared symmetries with the root.

    For finite groups this is max_G |G L - L G|_F / |L|_F; continuous and
    cyclic(>=3) classes measure the deviation of the root from its required
    shape. Asymmetric classes return 0.
    """
    lam = model.lambda_matrix
    lam_norm = max(np.linalg.norm(lam), np.finfo(float).tiny)
    sym = model.symmetry
    if sym is SymmetryClass.FINITE:
        return max(
            float(np.linalg.norm(g @ lam - lam @ g)) / lam_norm for g in model.group
        )
    if sym.is_revolution:
        target = np.diag([model.lambda_r, model.lambda_r, model.lambda_z])
        return float(np.linalg.norm(lam - target)) / lam_norm
    if sym is SymmetryClass.SPHERICAL or sym is SymmetryClass.CIRCULAR_2D or (
        sym is SymmetryClass.CYCLIC_2D and model.cyclic_order >= 3
    ):
        iso = np.trace(lam) / model.dimension
        return float(np.linalg.norm(lam - iso * np.eye(model.dimension))) / lam_norm
    return 0.0


def save_model(model: ObjectModel, path) -> None:
    """Write a model to JSON (group elements serialized as unit quaternions)."""
    ct = model.canonical_transform
    if model.dimension == 3:
        transform = {
            "quaternion": [float(x) for x in matrix_to_quat(ct.rotation)],
            "translation": [float(x) for x in ct.translation],
        }
        quats = (
            [[float(x) for x in matrix_to_quat(g)] for g in model.group]
            if model.group is not None
            else []
        )
    else:
        transform = {
            "angle": float(ct.angle),
            "translation": [float(x) for x in ct.translation],
        }
        quats = []
    doc = {
        "dimension": model.dimension,
        "symmetry_class": model.symmetry.value,
        "group_quaternions": quats,
        "cyclic_order": model.cyclic_order,
        "lambda_matrix": [float(x) for x in model.lambda_matrix.ravel()],
        "lambda_r": model.lambda_r,
        "lambda_z": model.lambda_z,
        "lambda": model.lambda_,
        "surface_area": model.surface_area,
        "T": model.T,
        "canonical_transform": transform,
    }
    dump_json(doc, path)


def load_model(path) -> ObjectModel:
    """Read a model written by :func:`save_model`."""
    doc = load_json(path)
    symmetry = SymmetryClass(doc["symmetry_class"])
    dim = int(doc["dimension"])
    if dim != symmetry.dimension:
        raise ValueError(f"dimension {dim} inconsistent with class {symmetry.value}")
    lam = np.array(doc["lambda_matrix"], dtype=float).reshape(dim, dim)
    group = None
    if symmetry is SymmetryClass.FINITE:
        group = [quat_to_matrix(q) for q in doc["group_quaternions"]]
    ct_doc = doc.get("canonical_transform")
    if ct_doc is None:
        ct = RigidTransform.identity(dim)
    elif dim == 3:
        ct = RigidTransform.from_quaternion(ct_doc["quaternion"], ct_doc["translation"])
    else:
        ct = RigidTransform.from_angle(ct_doc["angle"], ct_doc["translation"])
    model = ObjectModel(
        symmetry,
        lam,
        group=group,
        cyclic_order=doc.get("cyclic_order"),
        surface_area=float(doc.get("surface_area", 0.0)),
        canonical_transform=ct,
    )
    if "T" in doc and doc["T"] is not None:
        model._t_cache = float(doc["T"])
    return model
