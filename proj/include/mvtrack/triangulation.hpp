#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "mvtrack/geometry.hpp"
#include "mvtrack/types.hpp"
#include "mvtrack/windows.hpp"

namespace mvtrack {

struct CmmtParams {
    int phi = 7;          // interpolation window (frames)
    double kappa = 0.2;   // 3D clustering cut (meters)
};

// Observed tracklet plus synthesized positions: gap infill by linear
// interpolation between observed neighbors within +-phi, plus the
// interpolant's value at each observed frame (the observation itself) as a
// synthetic duplicate. Both feed extra stereo candidates into the majority
// vote.
struct InterpolatedTracklet {
    Tracklet2D base;
    std::map<int, Observation2D> infill;

    // Entries contributed at one frame: (observation, synthetic flag).
    std::vector<std::pair<const Observation2D*, bool>> entries_at(int frame) const;
};

struct Candidate {
    Point3D point = Point3D::Zero();
    int camera_a = 0;
    int camera_b = 0;
    bool synthetic_a = false;
    bool synthetic_b = false;
    double residual = 0.0;
};

struct CandidateSet {
    int frame = 0;
    std::vector<Candidate> candidates;
};

// Short-term 3D tracklet for one cluster in one window. Footprint mode fills
// `points`; pose mode fills `poses` and mirrors the valid-joint centroid into
// `points` for linking and reporting.
struct Tracklet3D {
    int keyframe = 0;
    int cluster_id = 0;
    std::map<int, Point3D> points;
    std::map<int, Pose3D> poses;
    std::map<int, std::uint8_t> synthetic_only;  // no observed entry contributed

    bool empty() const { return points.empty(); }
    bool pose_mode() const { return !poses.empty(); }
};

struct CmmtDiagnostics {
    int empty_frames = 0;                          // frames with < 2 cameras
    std::vector<std::pair<int, int>> candidates;   // (frame, candidate count)
};

InterpolatedTracklet interpolate_tracklet(const Tracklet2D& tracklet, int phi,
                                          int window_start, int window_end);

// All cross-camera stereo pairs at one frame over the merged (observed +
// infill) entries of the cluster's tracklets, triangulated. Degenerate
// baselines are skipped. Throws EmptyFrameError when fewer than two cameras
// contribute.
CandidateSet candidate_positions(const std::vector<InterpolatedTracklet>& cluster,
                                 int frame, const CameraRig& rig);

// Pose-mode variant for one joint index; entries contribute only where that
// joint is valid.
CandidateSet candidate_positions_joint(const std::vector<InterpolatedTracklet>& cluster,
                                       int frame, int joint, const CameraRig& rig);

// Agglomerative complete-linkage on Euclidean distance, merging while the
// smallest complete-link distance is below kappa. Clusters are reported
// sorted by smallest member index.
std::vector<std::vector<int>> complete_linkage_3d(const std::vector<Point3D>& points,
                                                  double kappa);

struct FusedPoint {
    Point3D point = Point3D::Zero();
    std::vector<int> inliers;  // surviving member indices of the winning cluster
};

// Centroid of the largest cluster; size ties break on the smallest mean
// intra-cluster pairwise distance, then the lowest member index. Members
// farther than kappa from the centroid are dropped once and the centroid
// recomputed.
FusedPoint fuse_largest(const std::vector<std::vector<int>>& clusters,
                        const std::vector<Point3D>& points, double kappa);

// Full per-cluster pipeline: interpolate, then per frame triangulate all
// pairs, reject outliers by complete linkage and fuse the largest cluster.
// Frames where no camera pair exists are absent from the result. Throws
// EmptyTrackletError when no frame yields a position.
Tracklet3D cmmt(const std::vector<Tracklet2D>& cluster, const Window& window,
                const CameraRig& rig, const CmmtParams& params, bool pose_mode,
                CmmtDiagnostics* diagnostics = nullptr);

// Ablation baselines. Both use single-frame observed entries only.
struct RansacParams {
    double threshold_factor = 0.05;  // inlier gate: factor * (w + h) pixels
    int iterations = 100;
    std::uint64_t seed = 7;
};

// Mean of all cross-camera pair triangulations at each frame.
Tracklet3D plain_triangulation(const std::vector<Tracklet2D>& cluster,
                               const Window& window, const CameraRig& rig,
                               bool pose_mode);

// Best stereo pair by reprojection-inlier count at each frame.
Tracklet3D ransac_triangulation(const std::vector<Tracklet2D>& cluster,
                                const Window& window, const CameraRig& rig,
                                const RansacParams& params, bool pose_mode);

}  // namespace mvtrack
