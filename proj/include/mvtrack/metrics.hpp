#pragma once

#include <map>
#include <vector>

#include "mvtrack/types.hpp"

namespace mvtrack {

// Completed trajectories keyed by id: footprint points and, in pose mode,
// joint arrays per frame.
struct TrajectorySet {
    std::map<int, std::map<int, Point3D>> points;
    std::map<int, std::map<int, Pose3D>> poses;

    bool pose_mode() const { return !poses.empty(); }
};

struct MotReport {
    double mota = 0.0;
    double idf1 = 0.0;
    double mt = 0.0;  // fraction of GT trajectories tracked > 80%
    double ml = 0.0;  // fraction tracked < 20%
    long long fp = 0;
    long long fn = 0;
    long long ids = 0;
    long long gt_total = 0;  // sum over frames of GT count
    double mean_position_error = 0.0;  // over matched frames, meters
};

struct FrameMatch {
    std::vector<std::pair<int, int>> matches;  // (gt id, pred id)
    std::vector<int> missed_gt;
    std::vector<int> false_pred;
};

// One CLEAR step: previous matches within the gate carry over, the rest is
// min-cost matched gated at `threshold`. `prev` maps gt id -> pred id.
FrameMatch clear_match(const std::map<int, Point3D>& gt,
                       const std::map<int, Point3D>& pred, double threshold,
                       const std::map<int, int>& prev);

// CLEAR metrics plus IDF1 over complete trajectory sets, matching at
// `threshold` meters (pose trajectories compare the mean over valid joints).
MotReport evaluate_tracking(const TrajectorySet& gt, const TrajectorySet& pred,
                            double threshold);

// IDF1 alone: global id-to-id matching maximizing per-frame overlap.
double idf1(const TrajectorySet& gt, const TrajectorySet& pred, double threshold);

struct PcpReport {
    std::map<int, double> per_actor;  // gt id -> ratio of correct limbs
    double average = 0.0;
};

// Percentage of correctly estimated parts: a limb counts as correct when both
// predicted endpoints lie within alpha * (GT limb length) of their GT
// endpoints. Predictions are matched to GT actors per frame by mean joint
// distance; unmatched GT limbs count as evaluated and incorrect.
PcpReport pcp(const TrajectorySet& gt, const TrajectorySet& pred,
              const std::vector<std::pair<int, int>>& limbs, double alpha = 0.5);

// Default 15-joint skeleton limb table (joint-index pairs).
const std::vector<std::pair<int, int>>& default_limbs();

}  // namespace mvtrack
