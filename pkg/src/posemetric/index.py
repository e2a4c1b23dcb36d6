"""Spatial index over the aggregated representatives of a pose set.

All representatives of all poses are stacked into one point cloud indexed by
a kd-tree; queries around any one representative of the query pose retrieve
exact pose-level neighbors after deduplication (smallest distance wins per
pose). Duplicates cannot occur for radii below T/2, but deduplication is
applied unconditionally.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from .model import ObjectModel
from .representation import Pose, representative, representatives


class Neighbor(NamedTuple):
    pose_index: int
    distance: float


class PoseIndex:
    """Immutable index over a vote set; safe for concurrent queries."""

    def __init__(self, model: ObjectModel, poses):
        poses = list(poses)
        if not poses:
            raise ValueError("cannot build an index over an empty pose list")
        self.model = model
        self.poses = poses
        blocks = [representatives(model, p) for p in poses]
        self.points = np.concatenate(blocks, axis=0)
        self.owner = np.repeat(np.arange(len(poses)), model.rep_count)
        self.tree = cKDTree(self.points)
        self.T = model.T

    def __len__(self) -> int:
        return len(self.poses)

    def _ball(self, point: np.ndarray, r: float):
        """Pose-deduplicated hits within r of an ambient point.

        Returns (pose indices, their closest representative points, distances),
        unordered by pose.
        """
        hits = self.tree.query_ball_point(point, r)
        if not hits:
            return (
                np.empty(0, dtype=int),
                np.empty((0, self.points.shape[1])),
                np.empty(0),
            )
        hits = np.asarray(hits, dtype=int)
        dists = np.linalg.norm(self.points[hits] - point, axis=1)
        owners = self.owner[hits]
        order = np.lexsort((dists, owners))
        owners, dists, hits = owners[order], dists[order], hits[order]
        first = np.ones(len(owners), dtype=bool)
        first[1:] = owners[1:] != owners[:-1]
        return owners[first], self.points[hits[first]], dists[first]

    def radius_search(self, query: Pose, r: float) -> list[Neighbor]:
        return radius_search(self, query, r)

    def k_nearest(self, query: Pose, k: int) -> list[Neighbor]:
        return k_nearest(self, query, k)


def build_index(model: ObjectModel, poses) -> PoseIndex:
    """Index the representatives of a nonempty pose list."""
    return PoseIndex(model, poses)


def radius_search(index: PoseIndex, query: Pose, r: float) -> list[Neighbor]:
    """Poses within pose distance r of the query, ascending distance.

    Each pose appears once, with its true pose distance (minimum over its
    representatives); ties are broken by pose index.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    anchor = representative(index.model, query)
    owners, _, dists = index._ball(anchor, r)
    order = np.lexsort((owners, dists))
    return [Neighbor(int(owners[i]), float(dists[i])) for i in order]


def k_nearest(index: PoseIndex, query: Pose, k: int) -> list[Neighbor]:
    """k distinct poses with smallest pose distance (fewer if the set is smaller).

    Implemented by over-fetching k * |R(.)| representative neighbors (provably
    sufficient, each pose owning |R(.)| points) and deduplicating; ties are
    broken by pose index.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    fetch = min(k * index.model.rep_count, len(index.points))
    _, hits = index.tree.query(anchor := representative(index.model, query), fetch)
    hits = np.atleast_1d(np.asarray(hits, dtype=int))
    dists = np.linalg.norm(index.points[hits] - anchor, axis=1)
    owners = index.owner[hits]
    order = np.lexsort((owners, dists))
    owners, dists = owners[order], dists[order]
    out: list[Neighbor] = []
    seen: set[int] = set()
    for o, d in zip(owners, dists):
        if int(o) in seen:
            continue
        seen.add(int(o))
        out.append(Neighbor(int(o), float(d)))
        if len(out) == k:
            break
    return out
