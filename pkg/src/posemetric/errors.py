"""Exception types raised across the package."""
from __future__ import annotations


class DegenerateMeshError(ValueError):
    """Mesh (or polyline) has zero total surface measure."""


class SymmetryMismatchError(ValueError):
    """Declared symmetry is inconsistent with the object's geometry."""


class NotAGroupError(ValueError):
    """A set of rotations fails the group axioms (closure/inverse/identity)."""


class ProjectionError(ValueError):
    """Ambient point has no unique projection onto the pose space.

    Carries the offending rotational-block residual in ``residual`` so callers
    (e.g. mean shift) can decide to keep a previous iterate.
    """

    def __init__(self, message: str, residual: float = 0.0):
        super().__init__(message)
        self.residual = residual


class NearDegenerateProjectionWarning(UserWarning):
    """Projection is close to non-unique (tied singular values with sign fix)."""


class NoConsistentTupleError(ValueError):
    """No consistent tuple of representatives exists for the given poses."""


class RadiusGuaranteeWarning(UserWarning):
    """Explicit mean-shift radius loses a dedup/consistency guarantee."""
