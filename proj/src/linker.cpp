#include "mvtrack/linker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvtrack/errors.hpp"

namespace mvtrack {

namespace {

// Pose distance at one frame: mean over jointly valid joints.
std::optional<double> pose_distance(const Pose3D& a, const Pose3D& b) {
    const std::size_t joints = std::min(a.joints.size(), b.joints.size());
    double sum = 0.0;
    int n = 0;
    for (std::size_t j = 0; j < joints; ++j) {
        if (!a.valid[j] || !b.valid[j]) continue;
        sum += (a.joints[j] - b.joints[j]).norm();
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

template <typename PointsA, typename PosesA>
std::optional<double> mean_overlap_distance(const PointsA& points_a, const PosesA& poses_a,
                                            const Tracklet3D& b) {
    double sum = 0.0;
    int n = 0;
    const bool pose_mode = !poses_a.empty() && b.pose_mode();
    if (pose_mode) {
        for (const auto& [frame, pose] : poses_a) {
            auto it = b.poses.find(frame);
            if (it == b.poses.end()) continue;
            if (const auto d = pose_distance(pose, it->second)) {
                sum += *d;
                ++n;
            }
        }
    } else {
        for (const auto& [frame, p] : points_a) {
            auto it = b.points.find(frame);
            if (it == b.points.end()) continue;
            sum += (p - it->second).norm();
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

}  // namespace

std::optional<double> tracklet3d_distance(const Tracklet3D& a, const Tracklet3D& b) {
    return mean_overlap_distance(a.points, a.poses, b);
}

MatchResult assign(const std::vector<std::vector<std::optional<double>>>& distances,
                   double gate) {
    std::vector<std::vector<double>> cost(distances.size());
    for (std::size_t i = 0; i < distances.size(); ++i) {
        cost[i].reserve(distances[i].size());
        for (const auto& d : distances[i]) {
            cost[i].push_back(d ? *d : std::numeric_limits<double>::quiet_NaN());
        }
    }
    return solve_assignment(cost, gate);
}

TrackLinker::TrackLinker(LinkerParams params) : params_(params) {}

std::optional<double> TrackLinker::track_to_tracklet_distance(
    const LongTrack& track, const Tracklet3D& tracklet) const {
    return mean_overlap_distance(track.points, track.poses, tracklet);
}

void TrackLinker::absorb(LongTrack& track, const Tracklet3D& tracklet) {
    // Newer window wins on overlapping frames.
    for (const auto& [frame, p] : tracklet.points) track.points[frame] = p;
    for (const auto& [frame, pose] : tracklet.poses) track.poses[frame] = pose;
    track.last_keyframe = tracklet.keyframe;
    track.misses = 0;
}

void TrackLinker::link(int keyframe, const std::vector<Tracklet3D>& window_tracklets) {
    if (last_keyframe_ && keyframe <= *last_keyframe_) {
        throw OutOfOrderWindowError("window keyframe " + std::to_string(keyframe) +
                                    " not after " + std::to_string(*last_keyframe_));
    }
    last_keyframe_ = keyframe;

    MatchResult result;
    if (live_.empty() || window_tracklets.empty()) {
        // An empty cost matrix cannot carry the other side's size.
        for (std::size_t i = 0; i < live_.size(); ++i) {
            result.unmatched_rows.push_back(static_cast<int>(i));
        }
        for (std::size_t j = 0; j < window_tracklets.size(); ++j) {
            result.unmatched_cols.push_back(static_cast<int>(j));
        }
    } else {
        std::vector<std::vector<std::optional<double>>> distances(
            live_.size(), std::vector<std::optional<double>>(window_tracklets.size()));
        for (std::size_t i = 0; i < live_.size(); ++i) {
            for (std::size_t j = 0; j < window_tracklets.size(); ++j) {
                distances[i][j] =
                    track_to_tracklet_distance(live_[i], window_tracklets[j]);
            }
        }
        result = assign(distances, params_.gate);
    }

    for (const auto& [i, j] : result.matches) {
        absorb(live_[i], window_tracklets[j]);
    }
    for (int j : result.unmatched_cols) {
        LongTrack track;
        track.global_id = next_global_id_++;
        absorb(track, window_tracklets[j]);
        live_.push_back(std::move(track));
    }

    // Unmatched existing tracks age out (iterate the pre-spawn prefix).
    std::vector<char> terminate(live_.size(), 0);
    for (int i : result.unmatched_rows) {
        live_[i].misses += 1;
        if (live_[i].misses >= params_.max_window_misses) terminate[i] = 1;
    }
    for (std::size_t i = live_.size(); i-- > 0;) {
        if (i < terminate.size() && terminate[i]) {
            finished_.push_back(std::move(live_[i]));
            live_.erase(live_.begin() + static_cast<std::ptrdiff_t>(i));
        }
    }
}

std::vector<LongTrack> TrackLinker::finish() {
    for (auto& t : live_) finished_.push_back(std::move(t));
    live_.clear();
    std::sort(finished_.begin(), finished_.end(),
              [](const LongTrack& a, const LongTrack& b) { return a.global_id < b.global_id; });
    return finished_;
}

}  // namespace mvtrack
