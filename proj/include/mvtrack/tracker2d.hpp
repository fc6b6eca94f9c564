#pragma once

#include <Eigen/Core>
#include <vector>

#include "mvtrack/types.hpp"

namespace mvtrack {

struct TrackerParams {
    double iou_min = 0.3;      // association gate on IoU
    int max_age = 10;          // frames a track survives unmatched
    int min_hits = 2;          // consecutive matches before confirmation
    double smoothing = 0.5;    // exponential smoothing factor on velocity
};

// Constant-velocity state of one live track.
struct Track2DState {
    int local_id = 0;
    Observation2D last_box;
    Eigen::Vector4d velocity = Eigen::Vector4d::Zero();  // dx, dy, dw, dh per frame
    int age = 0;
    int time_since_update = 0;
    int hit_streak = 0;
    bool confirmed = false;
    Tracklet2D history;
};

// Box advanced one frame along the track velocity; w, h clamped to >= 1 px.
Observation2D predict(const Track2DState& state);

// Intersection-over-union of two center+size boxes; disjoint boxes give 0.
double iou(const Observation2D& a, const Observation2D& b);

// Greedy-free SORT-style tracker for one camera stream. Drive with one
// step() per frame in increasing frame order; finished tracklets accumulate
// and the rest are flushed by finish().
class Tracker2D {
public:
    Tracker2D(int camera_id, TrackerParams params = {});

    // Associates this frame's detections to live tracks (min-cost matching on
    // 1 - IoU, gated at iou_min), updates states, spawns tentative tracks for
    // unmatched detections and retires stale tracks. Throws
    // FrameRegressionError when `frame` does not advance.
    void step(int frame, const std::vector<Observation2D>& detections);

    // Terminates all live tracks and returns every emitted tracklet.
    std::vector<Tracklet2D> finish();

    const std::vector<Track2DState>& live_tracks() const { return tracks_; }
    const std::vector<Tracklet2D>& emitted() const { return emitted_; }
    int camera_id() const { return camera_id_; }

private:
    void retire(std::size_t index);

    int camera_id_;
    TrackerParams params_;
    int next_local_id_ = 0;
    int last_frame_ = -1;
    std::vector<Track2DState> tracks_;
    std::vector<Tracklet2D> emitted_;
};

// Convenience: run a whole per-frame detection stream through one tracker.
std::vector<Tracklet2D> track_camera_stream(
    int camera_id, const std::vector<std::vector<Observation2D>>& frames,
    const TrackerParams& params = {});

}  // namespace mvtrack
