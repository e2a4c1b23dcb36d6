"""Command-line front end: mesh analysis, pose distance, vote clustering.

Owns the file formats: model JSON (see :mod:`posemetric.model`), vote files
(JSON, or CSV with header ``w,x,y,z,tx,ty,tz[,weight]`` for 3D), mode lists
and ground-truth side files. All JSON is UTF-8, newline-terminated, with
floats at 17 significant digits.

Exit codes: 0 ok, 2 input error, 3 symmetry mismatch, 4 empty input,
5 internal numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from .errors import NotAGroupError, ProjectionError, SymmetryMismatchError
from .geom import RigidTransform, random_rotation
from .jsonio import dump_json, load_json
from .mesh import Polyline2D, TriangleMesh, load_obj
from .metric import SamplingPlan, distance, distance_oracle
from .model import (
    ObjectModel,
    SymmetryClass,
    canonicalize_frame,
    lemma1_residual,
    load_model,
    save_model,
)
from .modeseek import (
    MeanShiftConfig,
    VoteSet,
    extract_modes,
    resolve_radius,
    se3_baseline_model,
    synth_votes,
)
from .representation import Pose

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SYMMETRY = 3
EXIT_EMPTY = 4
EXIT_NUMERICAL = 5


class EmptyInputError(ValueError):
    pass


# ---------------------------------------------------------------- records

def pose_to_record(pose: Pose, weight: float | None = None) -> dict:
    if pose.dim == 3:
        rec = {
            "quaternion": [float(x) for x in pose.quaternion],
            "translation": [float(x) for x in pose.translation],
        }
    else:
        rec = {"angle": float(pose.angle), "translation": [float(x) for x in pose.translation]}
    if weight is not None:
        rec["weight"] = float(weight)
    return rec


def record_to_pose(rec: dict) -> Pose:
    if "quaternion" in rec:
        return Pose.from_quaternion(rec["quaternion"], rec["translation"])
    return Pose.from_angle(float(rec["angle"]), rec["translation"])


def parse_pose_arg(text: str, dim: int) -> Pose:
    """Inline pose: 'w,x,y,z,tx,ty,tz' for 3D, 'theta,tx,ty' for 2D."""
    vals = [float(v) for v in text.split(",")]
    if dim == 3:
        if len(vals) != 7:
            raise ValueError(f"expected 7 comma-separated values for a 3D pose, got {len(vals)}")
        return Pose.from_quaternion(vals[:4], vals[4:])
    if len(vals) != 3:
        raise ValueError(f"expected 3 comma-separated values for a 2D pose, got {len(vals)}")
    return Pose.from_angle(vals[0], vals[1:])


def save_votes(path, poses, weights=None, dimension: int = 3) -> None:
    weights = weights if weights is not None else [None] * len(poses)
    dump_json(
        {
            "dimension": dimension,
            "votes": [pose_to_record(p, w) for p, w in zip(poses, weights)],
        },
        path,
    )


def load_votes(path) -> VoteSet:
    if str(path).endswith(".csv"):
        return _load_votes_csv(path)
    doc = load_json(path)
    records = doc["votes"] if isinstance(doc, dict) else doc
    if not records:
        raise EmptyInputError(f"{path}: no votes")
    poses = [record_to_pose(r) for r in records]
    weights = np.array([float(r.get("weight", 1.0)) for r in records])
    return VoteSet(poses, weights)


def _load_votes_csv(path) -> VoteSet:
    poses, weights = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyInputError(f"{path}: empty file")
        cols = [c.strip().lower() for c in header]
        if cols[:7] != ["w", "x", "y", "z", "tx", "ty", "tz"]:
            raise ValueError(f"{path}: CSV header must start with w,x,y,z,tx,ty,tz")
        has_weight = len(cols) > 7 and cols[7] == "weight"
        for row in reader:
            if not row or not "".join(row).strip():
                continue
            vals = [float(v) for v in row]
            poses.append(Pose.from_quaternion(vals[:4], vals[4:7]))
            weights.append(vals[7] if has_weight and len(vals) > 7 else 1.0)
    if not poses:
        raise EmptyInputError(f"{path}: no votes")
    return VoteSet(poses, np.array(weights))


def save_modes(path, modes, radius: float, dimension: int = 3) -> None:
    dump_json(
        {
            "dimension": dimension,
            "radius": radius,
            "modes": [
                {"pose": pose_to_record(m.pose), "score": m.score, "support": m.support}
                for m in modes
            ],
        },
        path,
    )


# ---------------------------------------------------------------- symmetry spec

def parse_symmetry_spec(spec: str):
    """Symmetry option: none | spherical | revolution | revolution-rotoreflection |
    finite:<quat-list-file> | cyclic2d:<n> | circular2d | none2d."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name == "finite":
        if not arg:
            raise ValueError("finite symmetry needs a quaternion list file: finite:<file>")
        quats = load_json(arg)
        from .geom import quat_to_matrix

        return SymmetryClass.FINITE, {"group": [quat_to_matrix(q) for q in quats]}
    if name == "cyclic2d":
        if not arg:
            raise ValueError("cyclic symmetry needs an order: cyclic2d:<n>")
        return SymmetryClass.CYCLIC_2D, {"cyclic_order": int(arg)}
    try:
        return SymmetryClass(name), {}
    except ValueError:
        raise ValueError(f"unknown symmetry spec {spec!r}") from None


# ---------------------------------------------------------------- commands

def cmd_analyze_mesh(args) -> int:
    mesh = load_obj(args.mesh)
    symmetry, extra = parse_symmetry_spec(args.symmetry)
    if args.axis is not None:
        extra["axis"] = [float(v) for v in args.axis.split(",")]
    model, transform = canonicalize_frame(
        mesh, symmetry, residual_tol=args.residual_tol, **extra
    )
    save_model(model, args.output)
    eigs = np.linalg.eigvalsh(model.lambda_matrix)
    print(f"symmetry class    {model.symmetry.value} (|R| = {model.rep_count})")
    print(f"surface area      {model.surface_area:.6g}")
    print(f"lambda eigenvalues {np.array2string(eigs, precision=6)}")
    if model.lambda_r is not None:
        print(f"lambda_r, lambda_z {model.lambda_r:.6g}, {model.lambda_z:.6g}")
    if model.lambda_ is not None:
        print(f"lambda            {model.lambda_:.6g}")
    print(f"T                 {model.T:.6g}")
    print(f"lemma-1 residual  {lemma1_residual(model):.3e}")
    print(f"model written to  {args.output}")
    return EXIT_OK


def cmd_distance(args) -> int:
    model = load_model(args.model)
    pa = parse_pose_arg(args.pose_a, model.dimension)
    pb = parse_pose_arg(args.pose_b, model.dimension)
    d = distance(model, pa, pb)
    print(f"distance          {d:.17g}")
    if args.oracle is not None:
        # the model's poses live in the canonical frame; bring the mesh there
        mesh = load_obj(args.oracle).transformed(model.canonical_transform)
        plan = SamplingPlan(args.samples, args.steps, args.seed)
        mc = distance_oracle(model, mesh, pa, pb, plan)
        gap = abs(d - mc) / max(d, 1e-9 * model.lambda_fro)
        print(f"oracle            {mc:.17g}")
        print(f"relative gap      {gap:.3e}")
    return EXIT_OK


def cmd_synth(args) -> int:
    model = load_model(args.model)
    rng = np.random.default_rng(args.seed)
    truths = _random_truths(model, args.instances, rng)
    votes = synth_votes(
        model,
        truths,
        per_instance=args.per_instance,
        rot_noise=np.deg2rad(args.rot_noise),
        trans_noise=args.trans_noise,
        outlier_fraction=args.outliers,
        seed=args.seed,
    )
    save_votes(args.output, votes.poses, votes.weights, model.dimension)
    truth_path = args.truths_out or _default_truth_path(args.output)
    dump_json(
        {"dimension": model.dimension, "truths": [pose_to_record(t) for t in truths]},
        truth_path,
    )
    print(f"{len(votes)} votes written to {args.output}")
    print(f"{len(truths)} ground-truth poses written to {truth_path}")
    return EXIT_OK


def _default_truth_path(votes_path: str) -> str:
    root, ext = os.path.splitext(votes_path)
    return f"{root}.truth{ext or '.json'}"


def _random_truths(model: ObjectModel, n: int, rng: np.random.Generator):
    """Well-separated random instance poses for synthetic scenes."""
    if n < 1:
        raise ValueError("instance count must be >= 1")
    dim = model.dimension
    spacing = 6.0 * max(model.lambda_fro, np.finfo(float).tiny)
    half = spacing * max(1.0, n ** (1.0 / dim))
    truths = []
    for _ in range(n):
        for _attempt in range(1000):
            t = rng.uniform(-half, half, size=dim)
            if all(np.linalg.norm(t - p.translation) >= spacing for p in truths):
                break
        truths.append(Pose(random_rotation(rng, dim), t))
    return truths


def cmd_cluster(args) -> int:
    model = load_model(args.model)
    votes = load_votes(args.votes)
    config = _mean_shift_config(args)
    radius = resolve_radius(model, config)
    modes = extract_modes(model, votes, config, workers=args.workers)
    save_modes(args.output, modes, radius, model.dimension)
    print(f"radius {radius:.6g}, {len(votes)} votes, {len(modes)} modes")
    print(f"{'rank':>4} {'score':>12} {'support':>8}")
    for i, m in enumerate(modes, start=1):
        print(f"{i:>4} {m.score:>12.4f} {m.support:>8}")
    print(f"modes written to {args.output}")
    return EXIT_OK


def _mean_shift_config(args) -> MeanShiftConfig:
    radius = "auto" if args.radius == "auto" else float(args.radius)
    return MeanShiftConfig(
        radius=radius,
        max_modes=args.max_modes,
        nms_radius=args.nms_radius,
    )


def _match_report(model, modes, truths, radius, top_k):
    """Rank-to-cover, duplicate count in top-k and first spurious score ratio."""
    threshold = 0.5 * radius
    covered: set[int] = set()
    rank_all = None
    duplicates_topk = 0
    first_spurious = None
    for i, mode in enumerate(modes, start=1):
        dists = [distance(model, mode.pose, t) for t in truths]
        best = int(np.argmin(dists))
        if dists[best] < threshold:
            if best in covered and i <= top_k:
                duplicates_topk += 1
            covered.add(best)
            if len(covered) == len(truths) and rank_all is None:
                rank_all = i
        elif first_spurious is None:
            first_spurious = mode.score / modes[0].score if modes[0].score > 0 else 0.0
    return rank_all, duplicates_topk, first_spurious


def cmd_compare(args) -> int:
    model = load_model(args.model)
    votes = load_votes(args.votes)
    truth_doc = load_json(args.truths)
    truths = [record_to_pose(r) for r in truth_doc["truths"]]
    if not truths:
        raise EmptyInputError(f"{args.truths}: no ground-truth poses")
    config = _mean_shift_config(args)
    radius = resolve_radius(model, config)
    config = MeanShiftConfig(
        radius=radius, max_modes=args.max_modes, nms_radius=args.nms_radius
    )
    pipelines = []
    if args.metric in ("proposed", "both"):
        pipelines.append(("proposed", model))
    if args.metric in ("se3", "both"):
        pipelines.append(("se3", se3_baseline_model(model)))
    print(f"radius {radius:.6g}, match threshold {0.5 * radius:.6g}, top-k = {args.max_modes}")
    print(f"{'metric':>10} {'rank-to-cover':>14} {'dups-in-top-k':>14} {'first-spurious':>15}")
    for name, pipeline_model in pipelines:
        modes = extract_modes(pipeline_model, votes, config, workers=args.workers)
        rank_all, dups, spurious = _match_report(model, modes, truths, radius, args.max_modes)
        rank_text = str(rank_all) if rank_all is not None else f">{len(modes)}"
        spurious_text = f"{spurious:.3f}" if spurious is not None else "-"
        print(f"{name:>10} {rank_text:>14} {dups:>14} {spurious_text:>15}")
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posemetric",
        description="Pose-space metric tools for rigid objects with proper symmetries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze-mesh", help="build a model JSON from an OBJ mesh")
    p.add_argument("mesh")
    p.add_argument(
        "--symmetry",
        required=True,
        help="none | spherical | revolution | revolution-rotoreflection | "
        "finite:<quat-json> | cyclic2d:<n> | circular2d | none2d",
    )
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--axis", help="revolution axis direction 'x,y,z' (detected if omitted)")
    p.add_argument("--residual-tol", type=float, default=0.01)
    p.set_defaults(func=cmd_analyze_mesh)

    p = sub.add_parser("distance", help="closed-form pose distance (optionally vs oracle)")
    p.add_argument("model")
    p.add_argument("--pose-a", required=True, help="'w,x,y,z,tx,ty,tz' (2D: 'theta,tx,ty')")
    p.add_argument("--pose-b", required=True)
    p.add_argument("--oracle", help="mesh OBJ for the Monte Carlo integral oracle")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--steps", type=int, default=720)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("synth", help="generate a synthetic vote set and ground truth")
    p.add_argument("model")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--instances", type=int, default=3)
    p.add_argument("--per-instance", type=int, default=200)
    p.add_argument("--rot-noise", type=float, default=10.0, help="degrees")
    p.add_argument("--trans-noise", type=float, default=0.0, help="length units")
    p.add_argument("--outliers", type=float, default=0.0, help="outlier fraction in [0, 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--truths-out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("cluster", help="extract density modes from a vote set")
    p.add_argument("model")
    p.add_argument("votes", help="votes JSON, or CSV with header w,x,y,z,tx,ty,tz[,weight]")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--radius", default="auto")
    p.add_argument("--max-modes", type=int, default=10)
    p.add_argument("--nms-radius", type=float, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("compare", help="proposed metric vs SE(3) baseline on one scene")
    p.add_argument("model")
    p.add_argument("votes")
    p.add_argument("truths", help="ground-truth JSON side file")
    p.add_argument("--metric", choices=("proposed", "se3", "both"), default="both")
    p.add_argument("--radius", default="auto")
    p.add_argument("--max-modes", type=int, default=10)
    p.add_argument("--nms-radius", type=float, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SymmetryMismatchError, NotAGroupError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SYMMETRY
    except EmptyInputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_EMPTY
    except (ProjectionError, FloatingPointError, np.linalg.LinAlgError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, ValueError, KeyError, TypeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
