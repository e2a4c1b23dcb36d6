"""Mean shift over the pose space, mode extraction and synthetic vote sets.

Each vote is used as a starting pose; a flat kernel of a given radius pulls
the iterate toward the weighted mean of the neighboring representatives,
which is projected back onto the pose space. Converged poses are scored with
the Epanechnikov kernel associated with the flat kernel and reduced to a mode
list by greedy non-maximum suppression.

Projection is performed every iteration by default, which keeps iterates on
the embedded pose space and makes convergence measurable in one norm; set
``project_each_iteration=False`` for the cheaper variant that projects only
once after convergence.
"""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ProjectionError, RadiusGuaranteeWarning
from .geom import RigidTransform, random_rotation, rotation_2d, rotation_about_axis
from .index import PoseIndex, build_index
from .metric import distance, se3_baseline_scale
from .model import ObjectModel, SymmetryClass
from .representation import Pose, closest_representative, project, representative


@dataclass
class VoteSet:
    """Ordered weighted poses sampling a pose distribution."""

    poses: list
    weights: np.ndarray = None

    def __post_init__(self):
        self.poses = list(self.poses)
        if not self.poses:
            raise ValueError("empty vote set")
        if self.weights is None:
            self.weights = np.ones(len(self.poses))
        else:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape != (len(self.poses),):
                raise ValueError("weights must parallel the pose list")
            if np.any(self.weights <= 0):
                raise ValueError("weights must be strictly positive")

    def __len__(self) -> int:
        return len(self.poses)


@dataclass(frozen=True)
class Mode:
    """A kernel-density mode: pose hypothesis, score and vote support."""

    pose: Pose
    score: float
    support: int


@dataclass(frozen=True)
class MeanShiftConfig:
    radius: object = "auto"
    max_iterations: int = 100
    convergence_tol: float | None = None
    max_modes: int = 10
    nms_radius: float | None = None
    project_each_iteration: bool = True

    def __post_init__(self):
        if self.max_iterations < 1 or self.max_modes < 1:
            raise ValueError("max_iterations and max_modes must be >= 1")


def resolve_radius(model: ObjectModel, config: MeanShiftConfig) -> float:
    """Mean-shift kernel radius, resolving the "auto" default.

    "auto" picks min(1.5 * lambda_min, 0.999 * T/4): 1.5 times the smallest
    eigenvalue of the covariance root, capped to the provably safe averaging
    bound for symmetric objects. An explicit radius is returned as-is but
    warns when it reaches T/4 (unambiguous-averaging guarantee lost) or T/2
    (representative-level dedup guarantee lost; index dedup still applies).
    """
    if config.radius == "auto":
        return float(min(1.5 * model.lambda_min, 0.999 * model.T / 4.0))
    r = float(config.radius)
    if r <= 0:
        raise ValueError("radius must be positive")
    if r >= model.T / 2.0:
        warnings.warn(
            f"radius {r:g} >= T/2 = {model.T / 2.0:g}: neighborhoods may mix "
            "representatives of one pose (deduplicated at the index level)",
            RadiusGuaranteeWarning,
            stacklevel=2,
        )
    elif r >= model.T / 4.0:
        warnings.warn(
            f"radius {r:g} >= T/4 = {model.T / 4.0:g}: averaging within a "
            "neighborhood loses its consistency guarantee",
            RadiusGuaranteeWarning,
            stacklevel=2,
        )
    return r


def _resolved(model: ObjectModel, config: MeanShiftConfig) -> MeanShiftConfig:
    r = resolve_radius(model, config)
    tol = config.convergence_tol
    if tol is None:
        tol = 1e-6 * max(model.lambda_fro, np.finfo(float).tiny)
    nms = config.nms_radius if config.nms_radius is not None else r
    return replace(config, radius=r, convergence_tol=tol, nms_radius=nms)


def mean_shift(
    model: ObjectModel,
    index: PoseIndex,
    start: Pose,
    config: MeanShiftConfig = MeanShiftConfig(),
    weights=None,
) -> Pose:
    """Shift one pose to a local density mode of the indexed vote set.

    Iterates: retrieve poses within the kernel radius of the current
    representative, average their anchor-closest representatives (vote
    weights apply), project, continue from the projected pose's closest
    representative. Stops when the representative moves less than the
    convergence tolerance, the neighborhood is empty, the projection
    degenerates (previous iterate kept), or the iteration cap is reached.
    """
    cfg = _resolved(model, config)
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
    pose = start
    p = representative(model, start)
    for _ in range(cfg.max_iterations):
        owners, pts, _ = index._ball(p, cfg.radius)
        if len(owners) == 0:
            break
        w = weights[owners] if weights is not None else np.ones(len(owners))
        m = w @ pts / w.sum()
        if cfg.project_each_iteration:
            try:
                pose = project(model, m)
            except ProjectionError:
                break
            p_new = closest_representative(model, pose, m)
        else:
            p_new = m
        done = np.linalg.norm(p_new - p) < cfg.convergence_tol
        p = p_new
        if done:
            break
    if not cfg.project_each_iteration:
        pose = project(model, p)
    return pose


def epanechnikov(d: float) -> float:
    """Density kernel associated with the flat mean-shift kernel."""
    return 0.75 * (1.0 - d * d) if abs(d) <= 1.0 else 0.0


def score_mode(
    model: ObjectModel, votes: VoteSet, mode: Pose, radius: float, index: PoseIndex | None = None
) -> float:
    """Kernel density score sum_i w_i * H(d(mode, P_i) / radius)."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if index is not None:
        anchor = representative(model, mode)
        owners, _, dists = index._ball(anchor, radius)
        return float(sum(votes.weights[o] * epanechnikov(d / radius) for o, d in zip(owners, dists)))
    return float(
        sum(
            w * epanechnikov(distance(model, mode, p) / radius)
            for p, w in zip(votes.poses, votes.weights)
        )
    )


def _vote_support(index: PoseIndex, model: ObjectModel, pose: Pose, radius: float) -> int:
    owners, _, _ = index._ball(representative(model, pose), radius)
    return int(len(owners))


def extract_modes(
    model: ObjectModel,
    votes: VoteSet,
    config: MeanShiftConfig = MeanShiftConfig(),
    workers: int | None = None,
) -> list[Mode]:
    """Most significant density modes of a vote set, descending score.

    Runs mean shift from every vote, scores the converged poses, then greedily
    accepts the highest-scoring pose and discards converged poses within
    ``nms_radius`` of an accepted mode, up to ``max_modes``. Deterministic for
    fixed inputs; independent shift runs may execute in parallel threads.
    """
    cfg = _resolved(model, config)
    index = build_index(model, votes.poses)
    if workers is None:
        workers = int(os.environ.get("POSEMETRIC_WORKERS", "1"))

    def run(start: Pose) -> Pose:
        return mean_shift(model, index, start, cfg, weights=votes.weights)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            shifted = list(pool.map(run, votes.poses))
    else:
        shifted = [run(p) for p in votes.poses]

    scored = [
        (score_mode(model, votes, pose, cfg.radius, index=index), i, pose)
        for i, pose in enumerate(shifted)
    ]
    scored.sort(key=lambda s: (-s[0], s[1]))
    modes: list[Mode] = []
    for score, _, pose in scored:
        if len(modes) == cfg.max_modes:
            break
        if any(distance(model, pose, m.pose) <= cfg.nms_radius for m in modes):
            continue
        modes.append(Mode(pose, score, _vote_support(index, model, pose, cfg.radius)))
    return modes


def _random_symmetry(model: ObjectModel, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random element of the object's proper symmetry group."""
    sym = model.symmetry
    if sym is SymmetryClass.NONE_3D or sym is SymmetryClass.NONE_2D:
        return np.eye(model.dimension)
    if sym is SymmetryClass.FINITE:
        return model.group[rng.integers(len(model.group))]
    if sym is SymmetryClass.SPHERICAL:
        return random_rotation(rng, 3)
    if sym is SymmetryClass.CIRCULAR_2D:
        return rotation_2d(rng.uniform(0.0, 2.0 * np.pi))
    if sym is SymmetryClass.CYCLIC_2D:
        k = int(rng.integers(model.cyclic_order))
        return rotation_2d(2.0 * np.pi * k / model.cyclic_order)
    rz = rotation_about_axis([0.0, 0.0, 1.0], rng.uniform(0.0, 2.0 * np.pi))
    if sym is SymmetryClass.REVOLUTION_ROTOREFLECTION and rng.integers(2):
        return rotation_about_axis([1.0, 0.0, 0.0], np.pi) @ rz
    return rz


def _random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def synth_votes(
    model: ObjectModel,
    truths,
    per_instance: int,
    rot_noise: float,
    trans_noise: float,
    outlier_fraction: float = 0.0,
    seed: int = 0,
) -> VoteSet:
    """Synthetic vote set around ground-truth poses.

    Each signal vote right-composes a uniformly random proper symmetry of the
    object (scrambling the rigid-transform parameterization while leaving the
    pose unchanged), then perturbs the orientation by a half-normal angle
    about a uniform axis (applied about the instance position) and the
    position by Gaussian noise. Outlier poses are uniform over the inflated
    bounding region of the truths; ``outlier_fraction`` is their share of the
    final vote set. Deterministic under ``seed``; all weights are 1.
    """
    truths = list(truths)
    if not truths or per_instance < 1:
        raise ValueError("need at least one truth and one vote per instance")
    if not 0.0 <= outlier_fraction < 1.0:
        raise ValueError("outlier_fraction must be in [0, 1)")
    rng = np.random.default_rng(seed)
    dim = model.dimension
    poses = []
    for truth in truths:
        for _ in range(per_instance):
            scrambled = truth.rotation @ _random_symmetry(model, rng)
            if dim == 3:
                angle = abs(rng.normal(0.0, rot_noise)) if rot_noise > 0 else 0.0
                noise_rot = rotation_about_axis(_random_unit_vector(rng), angle)
            else:
                noise_rot = rotation_2d(rng.normal(0.0, rot_noise) if rot_noise > 0 else 0.0)
            t = truth.translation + (
                rng.normal(0.0, trans_noise, size=dim) if trans_noise > 0 else 0.0
            )
            poses.append(Pose(noise_rot @ scrambled, t))
    n_signal = len(poses)
    n_out = int(round(outlier_fraction / (1.0 - outlier_fraction) * n_signal))
    if n_out:
        centers = np.stack([t.translation for t in truths])
        margin = 2.0 * model.lambda_fro
        lo = centers.min(axis=0) - margin
        hi = centers.max(axis=0) + margin
        for _ in range(n_out):
            poses.append(Pose(random_rotation(rng, dim), rng.uniform(lo, hi)))
    return VoteSet(poses)


def se3_baseline_model(model: ObjectModel) -> ObjectModel:
    """Symmetry-blind comparison model: no proper symmetry, isotropic root.

    The comparison distance sqrt(|dt|^2 + r^2 |R2 - R1|_F^2) is exactly the
    pose distance of a no-symmetry object with covariance root r * I, so the
    whole pipeline (index, mean shift, scoring) is reused unchanged.
    """
    r = se3_baseline_scale(model)
    sym = SymmetryClass.NONE_3D if model.dimension == 3 else SymmetryClass.NONE_2D
    return ObjectModel(sym, r * np.eye(model.dimension), surface_area=model.surface_area)
