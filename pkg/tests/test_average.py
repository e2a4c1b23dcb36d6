from __future__ import annotations

import numpy as np
import pytest

import posemetric as pm

from conftest import ALL_CLASSES, make_model, random_pose


def clustered_poses(model, rng, n, rot_spread, trans_spread, scramble=True):
    """n poses near one random truth, optionally symmetry-scrambled."""
    truth = random_pose(model, rng)
    out = []
    for _ in range(n):
        rot = truth.rotation
        if scramble and model.symmetry is pm.SymmetryClass.FINITE:
            rot = rot @ model.group[rng.integers(len(model.group))]
        if model.dimension == 3:
            noise = pm.rotation_about_axis(rng.normal(size=3), rot_spread * rng.normal())
        else:
            noise = pm.rotation_2d(rot_spread * rng.normal())
        out.append(pm.Pose(noise @ rot, truth.translation + trans_spread * rng.normal(size=model.dimension)))
    return truth, out


class TestFrechetVariance:
    def test_zero_at_common_pose(self, rng):
        model = make_model("none3d")
        pose = random_pose(model, rng)
        wp = pm.WeightedPoses([pose, pose, pose])
        assert pm.frechet_variance(model, wp, pose) == 0.0

    def test_two_spherical_poses(self):
        model = make_model("spherical")
        a = pm.Pose(np.eye(3), [0.0, 0.0, 0.0])
        b = pm.Pose(np.eye(3), [2.0, 0.0, 0.0])
        mid = pm.Pose(np.eye(3), [1.0, 0.0, 0.0])
        assert pm.frechet_variance(model, pm.WeightedPoses([a, b]), mid) == pytest.approx(2.0)

    def test_mean_beats_inputs_for_spherical(self, rng):
        model = make_model("spherical")
        wp = pm.WeightedPoses([random_pose(model, rng) for _ in range(6)])
        mean = pm.mean_estimate(model, wp)
        v = pm.frechet_variance(model, wp, mean)
        for p in wp.poses:
            assert v <= pm.frechet_variance(model, wp, p) + 1e-9

    def test_weight_validation(self, rng):
        model = make_model("spherical")
        with pytest.raises(ValueError):
            pm.WeightedPoses([random_pose(model, rng)], [0.0])
        with pytest.raises(ValueError):
            pm.WeightedPoses([], [])


class TestConsistentTuple:
    def test_single_representative_trivial(self, rng):
        model = make_model("revolution")
        wp = pm.WeightedPoses([random_pose(model, rng) for _ in range(4)])
        tup = pm.select_consistent_tuple(model, wp)
        assert tup.shape == (4, 6)

    def test_clustered_finite_consistent(self, rng):
        model = make_model("finite-c3")
        _, poses = clustered_poses(model, rng, 6, 0.05, 0.02)
        wp = pm.WeightedPoses(poses)
        tup = pm.select_consistent_tuple(model, wp)
        # all chosen representatives agree with each other within T/2
        orient = tup[:, :9]
        pair = np.linalg.norm(orient[:, None] - orient[None, :], axis=2)
        assert pair.max() < model.T / 2.0

    def test_flipped_axis_is_same_pose_and_consistent(self):
        # for a rotoreflection object the flipped axis denotes the same pose
        model = make_model("revolution-rotoreflection")
        up = model.reference_pose()
        down = pm.Pose(pm.rotation_about_axis([1, 0, 0], np.pi), np.zeros(3))
        assert pm.distance(model, up, down) < 1e-12
        assert pm.select_consistent_tuple(model, pm.WeightedPoses([up, down])).shape == (2, 6)

    def test_maximally_separated_axes_fail(self):
        # perpendicular axes: both sign pairings tie at equal distance, so the
        # strict definitional inequality fails
        model = make_model("revolution-rotoreflection")
        up = model.reference_pose()
        side = pm.Pose(pm.rotation_about_axis([1, 0, 0], np.pi / 2), np.zeros(3))
        with pytest.raises(pm.NoConsistentTupleError):
            pm.select_consistent_tuple(model, pm.WeightedPoses([up, side]))

    def test_prop8_tuples_pass_definitional_check(self, rng):
        # any tuple passing the pairwise T/2 test also passes the definition
        from posemetric.average import _definitional_check

        model = make_model("finite-c3")
        for _ in range(20):
            _, poses = clustered_poses(model, rng, 5, 0.08, 0.05)
            wp = pm.WeightedPoses(poses)
            all_reps = [pm.representatives(model, p) for p in wp.poses]
            anchor = all_reps[0][0]
            picks = [int(np.argmin(np.linalg.norm(r - anchor, axis=1))) for r in all_reps]
            chosen = np.stack([r[k] for r, k in zip(all_reps, picks)])
            pair = np.linalg.norm(chosen[:, None, :9] - chosen[None, :, :9], axis=2)
            if pair.max() < model.T / 2.0:
                assert _definitional_check(model, chosen, all_reps, picks)

    def test_prop9_ball_implies_prop8_pairwise(self, rng):
        model = make_model("finite-c3")
        for _ in range(50):
            pts = rng.normal(size=(5, 9))
            center = pts.mean(axis=0)
            radii = np.linalg.norm(pts - center, axis=1)
            if radii.max() < model.T / 4.0:
                pair = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
                assert pair.max() < model.T / 2.0


class TestMeanEstimate:
    def test_single_pose_identity(self, rng):
        model = make_model("finite-c3")
        pose = random_pose(model, rng)
        mean = pm.mean_estimate(model, pm.WeightedPoses([pose]))
        assert pm.distance(model, mean, pose) < 1e-12

    def test_equal_orientation_translation_average(self, rng):
        model = make_model("none3d")
        rot = pm.random_rotation(rng)
        a = pm.Pose(rot, [0.0, 0.0, 0.0])
        b = pm.Pose(rot, [2.0, 4.0, -6.0])
        mean = pm.mean_estimate(model, pm.WeightedPoses([a, b]))
        assert np.abs(mean.translation - [1.0, 2.0, -3.0]).max() < 1e-12
        assert np.abs(mean.rotation - rot).max() < 1e-9

    @pytest.mark.parametrize("key", ["finite-c3", "revolution-rotoreflection", "cyclic4"])
    def test_matches_exact_mean_on_clusters(self, key, rng):
        model = make_model(key)
        for _ in range(10):
            _, poses = clustered_poses(model, rng, 4, 0.04, 0.05)
            wp = pm.WeightedPoses(poses, rng.uniform(0.5, 2.0, size=4))
            est = pm.mean_estimate(model, wp)
            exact = pm.exact_mean_small(model, wp)
            assert pm.distance(model, est, exact.pose) < 1e-9

    def test_weight_scale_invariance(self, rng):
        model = make_model("finite-c3")
        _, poses = clustered_poses(model, rng, 5, 0.05, 0.05)
        w = rng.uniform(0.1, 1.0, size=5)
        m1 = pm.mean_estimate(model, pm.WeightedPoses(poses, w))
        m2 = pm.mean_estimate(model, pm.WeightedPoses(poses, 37.5 * w))
        assert pm.distance(model, m1, m2) < 1e-9

    def test_prop6_symmetric_tuples_same_mean(self, rng):
        # applying an ambient symmetry elementwise keeps the estimated mean
        model = make_model("finite-c3")
        _, poses = clustered_poses(model, rng, 4, 0.05, 0.05)
        wp = pm.WeightedPoses(poses)
        tup = pm.select_consistent_tuple(model, wp)
        base = pm.project(model, wp.weights @ tup / wp.weights.sum())
        from posemetric.average import _definitional_check

        for s in pm.ambient_symmetries(model):
            mapped = np.stack([s(row) for row in tup])
            mean = pm.project(model, wp.weights @ mapped / wp.weights.sum())
            assert pm.distance(model, base, mean) < 1e-9
            # the mapped tuple is itself consistent
            all_reps = [pm.representatives(model, p) for p in wp.poses]
            picks = []
            for reps, row in zip(all_reps, mapped):
                d = np.linalg.norm(reps - row, axis=1)
                picks.append(int(np.argmin(d)))
                assert d.min() < 1e-9
            assert _definitional_check(model, mapped, all_reps, picks)

    def test_propagates_no_consistent_tuple(self):
        model = make_model("revolution-rotoreflection")
        up = model.reference_pose()
        side = pm.Pose(pm.rotation_about_axis([1, 0, 0], np.pi / 2), np.zeros(3))
        with pytest.raises(pm.NoConsistentTupleError):
            pm.mean_estimate(model, pm.WeightedPoses([up, side]))

    def test_propagates_degenerate_projection(self):
        # opposite axes of a plain revolution object average to a zero axis
        model = make_model("revolution")
        up = model.reference_pose()
        down = pm.Pose(pm.rotation_about_axis([1, 0, 0], np.pi), np.zeros(3))
        with pytest.raises(pm.ProjectionError):
            pm.mean_estimate(model, pm.WeightedPoses([up, down]))


class TestExactMean:
    def test_single_representative_equals_estimate(self, rng):
        model = make_model("none2d")
        wp = pm.WeightedPoses([random_pose(model, rng) for _ in range(5)])
        est = pm.mean_estimate(model, wp)
        exact = pm.exact_mean_small(model, wp)
        assert pm.distance(model, est, exact.pose) < 1e-12
        assert exact.unique

    def test_two_rotoreflection_poses_enumerate_four(self, rng):
        model = make_model("revolution-rotoreflection")
        a, b = random_pose(model, rng), random_pose(model, rng)
        wp = pm.WeightedPoses([a, b])
        exact = pm.exact_mean_small(model, wp)
        # brute force over the 4 combinations
        reps_a = pm.representatives(model, a)
        reps_b = pm.representatives(model, b)
        best = None
        for i in range(2):
            for j in range(2):
                try:
                    cand = pm.project(model, 0.5 * (reps_a[i] + reps_b[j]))
                except pm.ProjectionError:
                    continue
                v = pm.frechet_variance(model, wp, cand)
                if best is None or v < best[1]:
                    best = (cand, v)
        assert abs(exact.variance - best[1]) < 1e-12

    def test_maximally_separated_axes_flagged_nonunique(self):
        # perpendicular axes: two distinct projected means tie in variance
        model = make_model("revolution-rotoreflection")
        up = model.reference_pose()
        side = pm.Pose(pm.rotation_about_axis([1, 0, 0], np.pi / 2), np.zeros(3))
        result = pm.exact_mean_small(model, pm.WeightedPoses([up, side]))
        assert not result.unique

    def test_tuple_guard(self, rng):
        model = make_model("cyclic4")
        poses = [random_pose(model, rng) for _ in range(11)]  # 4^11 > 1e6
        with pytest.raises(ValueError):
            pm.exact_mean_small(model, pm.WeightedPoses(poses))

    @pytest.mark.parametrize("key", ALL_CLASSES)
    def test_variance_at_exact_mean_not_beaten_by_probes(self, key, rng):
        model = make_model(key)
        _, poses = clustered_poses(model, rng, 4, 0.03, 0.05)
        wp = pm.WeightedPoses(poses)
        try:
            result = pm.exact_mean_small(model, wp)
        except pm.ProjectionError:
            pytest.skip("degenerate cluster")
        for _ in range(50):
            probe = random_pose(model, rng)
            assert result.variance <= pm.frechet_variance(model, wp, probe) + 1e-9
