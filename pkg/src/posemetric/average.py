"""Weighted Frechet-mean estimation over the pose space.

The mean of poses with a single representative each is the projection of the
weighted arithmetic mean of those representatives. Multi-representative
classes first need a consistent tuple (one representative per pose, each
strictly closer to the others than any alternative); consistency is checked
cheapest-first: ball radius T/4, pairwise T/2, then the full definitional
check. The ball/pairwise tests use orientation blocks only, which is the
strictly weaker sufficient condition (translations play no role in the
symmetry ambiguity of a bounded object).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConsistentTupleError, ProjectionError
from .model import ObjectModel
from .representation import Pose, project, representative, representatives

EXACT_MEAN_MAX_TUPLES = 10**6


class WeightedPoses:
    """Poses with strictly positive weights, in parallel order."""

    def __init__(self, poses, weights=None):
        self.poses = list(poses)
        if not self.poses:
            raise ValueError("empty pose list")
        if weights is None:
            w = np.ones(len(self.poses))
        else:
            w = np.array(weights, dtype=float)
        if w.shape != (len(self.poses),):
            raise ValueError("weights must parallel the pose list")
        if np.any(w <= 0):
            raise ValueError("weights must be strictly positive")
        w.setflags(write=False)
        self.weights = w

    def __len__(self) -> int:
        return len(self.poses)


def frechet_variance(model: ObjectModel, wp: WeightedPoses, at: Pose) -> float:
    """Weighted sum of squared pose distances to ``at``."""
    from .metric import distance

    return float(sum(w * distance(model, p, at) ** 2 for p, w in zip(wp.poses, wp.weights)))


def _orientation_blocks(model: ObjectModel, pts: np.ndarray) -> np.ndarray:
    return pts[:, : model.ambient_dim - model.dimension]


def _definitional_check(model: ObjectModel, chosen: np.ndarray, all_reps: list[np.ndarray], picks):
    """Strict consistency: every chosen representative beats every alternative.

    Distances equal up to rounding count as ties (the strict inequality
    fails), so exactly symmetric configurations are rejected regardless of
    which side floating point lands on.
    """
    for j, reps_j in enumerate(all_reps):
        for a in range(len(reps_j)):
            if a == picks[j]:
                continue
            alt = reps_j[a]
            for i in range(len(chosen)):
                d_chosen = np.linalg.norm(chosen[j] - chosen[i])
                d_alt = np.linalg.norm(alt - chosen[i])
                if not d_chosen < d_alt - 1e-12 * max(1.0, d_alt):
                    return False
    return True


def select_consistent_tuple(model: ObjectModel, wp: WeightedPoses) -> np.ndarray:
    """One representative per pose, verified consistent; rows parallel the poses.

    The candidate tuple anchors on the first pose's first representative and
    picks every other pose's closest representative to it. Raises
    :class:`NoConsistentTupleError` when the candidate fails the definitional
    check (poses spread across symmetry folds).
    """
    if model.rep_count == 1:
        return np.stack([representative(model, p) for p in wp.poses])
    all_reps = [representatives(model, p) for p in wp.poses]
    anchor = all_reps[0][0]
    picks = [int(np.argmin(np.linalg.norm(reps - anchor, axis=1))) for reps in all_reps]
    chosen = np.stack([reps[k] for reps, k in zip(all_reps, picks)])

    t = model.T
    orient = _orientation_blocks(model, chosen)
    if math.isfinite(t):
        center = orient.mean(axis=0)
        if np.linalg.norm(orient - center, axis=1).max() < t / 4.0:
            return chosen
        pair = np.linalg.norm(orient[:, None, :] - orient[None, :, :], axis=2)
        if pair.max() < t / 2.0:
            return chosen
    if _definitional_check(model, chosen, all_reps, picks):
        return chosen
    raise NoConsistentTupleError(
        "no consistent representative tuple: poses are spread across symmetry folds"
    )


def mean_estimate(model: ObjectModel, wp: WeightedPoses) -> Pose:
    """Estimated Frechet mean: projection of the mean of a consistent tuple.

    Independent of which symmetric consistent tuple is selected. For
    single-representative classes this is exactly the projection of the
    weighted mean of the unique representatives.
    """
    chosen = select_consistent_tuple(model, wp)
    m = wp.weights @ chosen / wp.weights.sum()
    return project(model, m)


@dataclass(frozen=True)
class ExactMeanResult:
    pose: Pose
    variance: float
    unique: bool


def exact_mean_small(model: ObjectModel, wp: WeightedPoses) -> ExactMeanResult:
    """Exhaustive mean: best projected mean over every representative tuple.

    Feasible only for |R(.)|^n <= 10^6 tuples; ties are broken by enumeration
    order and near-ties between distinct poses are reported via
    ``unique=False`` rather than an error.
    """
    n_tuples = model.rep_count ** len(wp)
    if n_tuples > EXACT_MEAN_MAX_TUPLES:
        raise ValueError(f"{n_tuples} representative tuples exceed the guard")
    from .metric import distance

    all_reps = [representatives(model, p) for p in wp.poses]
    wsum = wp.weights.sum()
    candidates: list[tuple[Pose, float]] = []
    last_error: ProjectionError | None = None
    for combo in itertools.product(*(range(len(r)) for r in all_reps)):
        pts = np.stack([all_reps[i][c] for i, c in enumerate(combo)])
        m = wp.weights @ pts / wsum
        try:
            cand = project(model, m)
        except ProjectionError as err:
            last_error = err
            continue
        candidates.append((cand, frechet_variance(model, wp, cand)))
    if not candidates:
        assert last_error is not None
        raise last_error
    best_pose, best_var = min(candidates, key=lambda cv: cv[1])
    unique = True
    tol = 1e-9 * max(best_var, np.finfo(float).tiny)
    sep = 1e-6 * max(model.lambda_fro, np.finfo(float).tiny)
    for cand, var in candidates:
        if abs(var - best_var) < tol and distance(model, cand, best_pose) > sep:
            unique = False
            break
    return ExactMeanResult(best_pose, best_var, unique)
