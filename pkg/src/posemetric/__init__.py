"""Frame-invariant pose metric for rigid objects with proper symmetries.

Poses of a symmetric object are equivalence classes of rigid transformations.
This package embeds them as small sets of points in a Euclidean space of at
most 12 dimensions, where the pose distance becomes a minimum of point
distances; on top of that it provides neighborhood queries, pose averaging
and mean-shift mode extraction over vote sets.
"""

from .average import (
    ExactMeanResult,
    WeightedPoses,
    exact_mean_small,
    frechet_variance,
    mean_estimate,
    select_consistent_tuple,
)
from .errors import (
    DegenerateMeshError,
    NearDegenerateProjectionWarning,
    NoConsistentTupleError,
    NotAGroupError,
    ProjectionError,
    RadiusGuaranteeWarning,
    SymmetryMismatchError,
)
from .geom import (
    RigidTransform,
    matrix_to_quat,
    quat_to_matrix,
    random_rotation,
    relative_rotation_angle,
    rotation_2d,
    rotation_about_axis,
)
from .index import Neighbor, PoseIndex, build_index, k_nearest, radius_search
from .mesh import (
    Polyline2D,
    TriangleMesh,
    load_obj,
    mesh_surface_stats,
    polyline_stats,
    sample_polyline,
    sample_surface,
)
from .metric import (
    SamplingPlan,
    distance,
    distance_oracle,
    rotation_displacement,
    se3_baseline_distance,
    se3_baseline_scale,
)
from .model import (
    ObjectModel,
    SymmetryClass,
    canonicalize_frame,
    lemma1_residual,
    load_model,
    min_representative_separation,
    save_model,
    sqrt_covariance,
    validate_symmetry_group,
)
from .modeseek import (
    MeanShiftConfig,
    Mode,
    VoteSet,
    extract_modes,
    mean_shift,
    resolve_radius,
    score_mode,
    se3_baseline_model,
    synth_votes,
)
from .representation import (
    AmbientSymmetry,
    Pose,
    ambient_symmetries,
    closest_representative,
    project,
    representative,
    representatives,
)

__version__ = "0.1.0"

__all__ = [
    "AmbientSymmetry",
    "DegenerateMeshError",
    "ExactMeanResult",
    "MeanShiftConfig",
    "Mode",
    "NearDegenerateProjectionWarning",
    "Neighbor",
    "NoConsistentTupleError",
    "NotAGroupError",
    "ObjectModel",
    "Polyline2D",
    "Pose",
    "PoseIndex",
    "ProjectionError",
    "RadiusGuaranteeWarning",
    "RigidTransform",
    "SamplingPlan",
    "SymmetryClass",
    "SymmetryMismatchError",
    "TriangleMesh",
    "VoteSet",
    "WeightedPoses",
    "ambient_symmetries",
    "build_index",
    "canonicalize_frame",
    "closest_representative",
    "distance",
    "distance_oracle",
    "exact_mean_small",
    "extract_modes",
    "frechet_variance",
    "k_nearest",
    "lemma1_residual",
    "load_model",
    "load_obj",
    "matrix_to_quat",
    "mean_estimate",
    "mean_shift",
    "mesh_surface_stats",
    "min_representative_separation",
    "polyline_stats",
    "project",
    "quat_to_matrix",
    "radius_search",
    "random_rotation",
    "relative_rotation_angle",
    "representative",
    "representatives",
    "resolve_radius",
    "rotation_2d",
    "rotation_about_axis",
    "rotation_displacement",
    "sample_polyline",
    "sample_surface",
    "save_model",
    "score_mode",
    "se3_baseline_distance",
    "se3_baseline_model",
    "se3_baseline_scale",
    "select_consistent_tuple",
    "sqrt_covariance",
    "synth_votes",
    "validate_symmetry_group",
]
