"""Smoke tests for the python bindings."""

import math
import os
import subprocess

import numpy as np
import pytest

import mvtrack


def look_at_projection(center, target, focal=1000.0, cx=960.0, cy=540.0):
    center = np.asarray(center, dtype=float)
    z = np.asarray(target, dtype=float) - center
    z /= np.linalg.norm(z)
    x = np.cross(z, [0.0, 0.0, 1.0])
    x /= np.linalg.norm(x)
    y = np.cross(z, x)
    rotation = np.stack([x, y, z])
    intrinsics = np.array([[focal, 0, cx], [0, focal, cy], [0, 0, 1.0]])
    return intrinsics @ np.hstack([rotation, (-rotation @ center)[:, None]])


def test_version():
    assert mvtrack.__version__


def test_epipolar_identity():
    P0 = look_at_projection([5.0, 0.0, 2.0], [0.0, 0.0, 1.0])
    P1 = look_at_projection([0.0, 5.0, 2.0], [0.0, 0.0, 1.0])
    F = mvtrack.fundamental_from_projections(P0, P1)
    X = np.array([0.3, -0.4, 1.2])
    x0, behind0 = mvtrack.project(P0, X)
    x1, behind1 = mvtrack.project(P1, X)
    assert not behind0 and not behind1
    h0 = np.append(x0, 1.0)
    h1 = np.append(x1, 1.0)
    h0 /= np.linalg.norm(h0)
    h1 /= np.linalg.norm(h1)
    assert abs(h1 @ F @ h0) <= 1e-9

    a, b, c = mvtrack.epipolar_line(F, x0)
    assert mvtrack.point_line_distance(x1, a, b, c) <= 1e-9

    point, residual = mvtrack.triangulate_pair(x0, x1, P0, P1)
    assert np.linalg.norm(point - X) <= 1e-6
    assert residual <= 1e-9

    assert mvtrack.normalized_pair_distance(x0, 50, 120, x1, 55, 130, F) <= 1e-9


def test_pdnc_handles_incalculable_and_forbidden():
    nan, inf = math.nan, math.inf
    # 0-1 same person across cameras; 2 disjoint in time from 1; 0-3 conflict.
    d = np.array(
        [
            [0.0, 0.1, nan, inf],
            [0.1, 0.0, 0.12, 0.8],
            [nan, 0.12, 0.0, 0.9],
            [inf, 0.8, 0.9, 0.0],
        ]
    )
    clusters = mvtrack.pdnc(d, 0.3)
    as_sets = {frozenset(c) for c in clusters}
    assert frozenset({0, 1, 2}) in as_sets
    assert frozenset({3}) in as_sets


def test_fusion_and_assignment():
    points = [
        [0.0, 0.0, 1.0],
        [0.05, 0.0, 1.0],
        [2.0, 0.0, 1.0],
    ]
    fused, inliers = mvtrack.fuse_largest(points, 0.2)
    assert inliers == [0, 1]
    assert abs(fused[0] - 0.025) <= 1e-12

    matches, un_rows, un_cols, cost = mvtrack.solve_assignment(
        [[0.1, 5.0], [5.0, 0.1]], 1.0
    )
    assert matches == [(0, 0), (1, 1)]
    assert cost == pytest.approx(0.2)


def test_end_to_end_pipeline(tmp_path):
    mvtrack.simulate(str(tmp_path), persons=2, cameras=3, frames=90, seed=4)
    result = mvtrack.run_pipeline(
        str(tmp_path / "calibration.txt"), str(tmp_path / "detections.txt")
    )
    gt = mvtrack.load_tracks_as_dict(str(tmp_path / "gt_tracks.txt"))
    report = mvtrack.evaluate_tracking(gt, result["trajectories"], 0.5)
    assert report["mota"] == 1.0
    assert report["ids"] == 0
    assert report["mean_position_error"] <= 1e-6


def test_ablation_ordering():
    r = mvtrack.ablate_triangulation(cameras=5, frames=120, seed=3)
    assert r["median_error_cmmt"] <= r["median_error_ransac"]
    assert r["median_error_ransac"] <= r["median_error_plain"]


def test_cli_roundtrip(tmp_path):
    cli = os.environ.get("MVTRACK_CLI")
    if not cli:
        pytest.skip("MVTRACK_CLI not set")
    sim_dir = tmp_path / "sim"
    subprocess.run(
        [cli, "simulate", "--out-dir", str(sim_dir), "--persons", "2",
         "--cameras", "3", "--frames", "60", "--seed", "11"],
        check=True, capture_output=True,
    )
    out = subprocess.run(
        [cli, "track", "--calib", str(sim_dir / "calibration.txt"),
         "--detections", str(sim_dir / "detections.txt"),
         "--output", str(sim_dir / "tracks.txt"),
         "--gt", str(sim_dir / "gt_tracks.txt")],
        check=True, capture_output=True, text=True,
    )
    assert "mota = 1" in out.stdout
