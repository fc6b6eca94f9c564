"""Multi-view multi-person 3D tracking.

Cross-view tracklet association with a scale-normalized epipolar distance,
robust multi-frame multi-view triangulation, and online sliding-window track
linking, with a synthetic-scene simulator and CLEAR/IDF1/PCP metrics.
"""

from ._core import (  # noqa: F401
    MvtrackError,
    __version__,
    ablate_triangulation,
    complete_linkage_3d,
    default_config_json,
    epipolar_line,
    evaluate_tracking,
    fundamental_from_projections,
    fuse_largest,
    load_tracks_as_dict,
    normalized_pair_distance,
    pdnc,
    point_line_distance,
    project,
    run_pipeline,
    simulate,
    solve_assignment,
    triangulate_pair,
)

__all__ = [
    "MvtrackError",
    "__version__",
    "ablate_triangulation",
    "complete_linkage_3d",
    "default_config_json",
    "epipolar_line",
    "evaluate_tracking",
    "fundamental_from_projections",
    "fuse_largest",
    "load_tracks_as_dict",
    "normalized_pair_distance",
    "pdnc",
    "point_line_distance",
    "project",
    "run_pipeline",
    "simulate",
    "solve_assignment",
    "triangulate_pair",
]
