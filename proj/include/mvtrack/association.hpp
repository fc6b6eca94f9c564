#pragma once

#include <vector>

#include "mvtrack/geometry.hpp"
#include "mvtrack/types.hpp"

namespace mvtrack {

// Distance between two windowed 2D tracklets. Three mutually exclusive
// states: a finite mean of per-frame cross-view distances; incalculable when
// the tracklets share no frames (any cameras); forbidden when they overlap in
// time within one camera and therefore must be different persons.
struct TrackletDistance {
    enum class Kind { Finite, Incalculable, Forbidden };

    Kind kind = Kind::Incalculable;
    double value = 0.0;  // meaningful only when kind == Finite

    static TrackletDistance finite(double v) { return {Kind::Finite, v}; }
    static TrackletDistance incalculable() { return {Kind::Incalculable, 0.0}; }
    static TrackletDistance forbidden() { return {Kind::Forbidden, 0.0}; }

    bool is_finite() const { return kind == Kind::Finite; }
    bool is_incalculable() const { return kind == Kind::Incalculable; }
    bool is_forbidden() const { return kind == Kind::Forbidden; }
};

// One executed merge, for the audit trail: cluster indices at merge time and
// the finite distance that justified the merge.
struct MergeRecord {
    int cluster_a = 0;
    int cluster_b = 0;
    double distance = 0.0;
};

// Partition of the windowed tracklets into person hypotheses, plus the final
// inter-cluster distance matrix (indexed like `clusters`).
struct ClusterSet {
    std::vector<std::vector<int>> clusters;  // member tracklet indices, sorted
    std::vector<std::vector<TrackletDistance>> distances;
    std::vector<MergeRecord> audit;
};

// Per-frame cross-view distance set over the common frames of two tracklets
// (empty when they do not overlap). Pose mode averages per-joint distances.
std::vector<double> pairwise_set_distance(const Tracklet2D& a, const Tracklet2D& b,
                                          const CameraRig& rig, bool pose_mode);

// Three-way case split: mean of the distance set when the cameras differ and
// frames overlap; incalculable without temporal overlap; forbidden for a
// same-camera temporal overlap.
TrackletDistance tracklet_distance(const Tracklet2D& a, const Tracklet2D& b,
                                   const CameraRig& rig, bool pose_mode);

// Full symmetric matrix of tracklet distances for one window.
std::vector<std::vector<TrackletDistance>> distance_matrix(
    const std::vector<Tracklet2D>& tracklets, const CameraRig& rig, bool pose_mode);

// Propagable distance-based non-parametric clustering. Starting from
// singletons, repeatedly merges the closest finite pair below `lambda`.
// After merging clusters i and j, the distance from the merged cluster to any
// other cluster q is:
//   - max of d(i,q), d(j,q) when both are calculable (forbidden dominates),
//   - the calculable one when exactly one is incalculable,
//   - incalculable when both are.
// Ties on the closest pair break on the lexicographically smallest index
// pair. The input matrix must be symmetric.
ClusterSet pdnc(const std::vector<std::vector<TrackletDistance>>& distances,
                double lambda);

// Combination rule used by the merge update, exposed for tests.
TrackletDistance pdnc_combine(const TrackletDistance& a, const TrackletDistance& b);

}  // namespace mvtrack
