#include "mvtrack/tracker2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvtrack/assignment.hpp"
#include "mvtrack/errors.hpp"

namespace mvtrack {

Observation2D predict(const Track2DState& state) {
    Observation2D box = state.last_box;
    const int gap = state.time_since_update + 1;
    box.center.x() += state.velocity(0) * gap;
    box.center.y() += state.velocity(1) * gap;
    box.width = std::max(1.0, box.width + state.velocity(2) * gap);
    box.height = std::max(1.0, box.height + state.velocity(3) * gap);
    box.frame = state.last_box.frame + gap;
    return box;
}

double iou(const Observation2D& a, const Observation2D& b) {
    const double ax0 = a.center.x() - a.width / 2, ax1 = a.center.x() + a.width / 2;
    const double ay0 = a.center.y() - a.height / 2, ay1 = a.center.y() + a.height / 2;
    const double bx0 = b.center.x() - b.width / 2, bx1 = b.center.x() + b.width / 2;
    const double by0 = b.center.y() - b.height / 2, by1 = b.center.y() + b.height / 2;
    const double iw = std::min(ax1, bx1) - std::max(ax0, bx0);
    const double ih = std::min(ay1, by1) - std::max(ay0, by0);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.width * a.height + b.width * b.height - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

Tracker2D::Tracker2D(int camera_id, TrackerParams params)
    : camera_id_(camera_id), params_(params) {}

void Tracker2D::step(int frame, const std::vector<Observation2D>& detections) {
    if (frame <= last_frame_) {
        throw FrameRegressionError("frame " + std::to_string(frame) +
                                   " not after frame " + std::to_string(last_frame_));
    }
    last_frame_ = frame;

    // Cost on predicted boxes, gated at iou_min.
    std::vector<std::vector<double>> cost(tracks_.size(),
                                          std::vector<double>(detections.size()));
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        const Observation2D pred = predict(tracks_[i]);
        for (std::size_t j = 0; j < detections.size(); ++j) {
            const double overlap = iou(pred, detections[j]);
            cost[i][j] = overlap >= params_.iou_min
                             ? 1.0 - overlap
                             : std::numeric_limits<double>::infinity();
        }
    }
    const MatchResult match = solve_assignment(cost);

    std::vector<char> det_used(detections.size(), 0);
    for (const auto& [ti, dj] : match.matches) {
        Track2DState& t = tracks_[ti];
        Observation2D det = detections[dj];
        det.frame = frame;
        det.camera_id = camera_id_;

        const Observation2D& prev = t.last_box;
        const double gap = static_cast<double>(frame - prev.frame);
        Eigen::Vector4d observed_vel;
        observed_vel << (det.center.x() - prev.center.x()) / gap,
            (det.center.y() - prev.center.y()) / gap, (det.width - prev.width) / gap,
            (det.height - prev.height) / gap;
        if (t.history.obs.size() == 1) {
            t.velocity = observed_vel;  // second observation defines velocity
        } else {
            t.velocity = params_.smoothing * t.velocity +
                         (1.0 - params_.smoothing) * observed_vel;
        }
        t.last_box = det;
        t.time_since_update = 0;
        t.hit_streak += 1;
        if (t.hit_streak >= params_.min_hits) {
            t.confirmed = true;
            t.history.confirmed = true;
        }
        t.history.obs.emplace(frame, det);
        det_used[dj] = 1;
    }

    for (auto& t : tracks_) {
        t.age += 1;
        if (t.last_box.frame != frame) {
            t.time_since_update += 1;
            t.hit_streak = 0;
        }
    }

    // Retire stale tracks (reverse order keeps indices valid).
    for (std::size_t i = tracks_.size(); i-- > 0;) {
        if (tracks_[i].time_since_update > params_.max_age) retire(i);
    }

    // Unmatched detections spawn tentative tracks, in detection order.
    for (std::size_t j = 0; j < detections.size(); ++j) {
        if (det_used[j]) continue;
        Track2DState t;
        t.local_id = next_local_id_++;
        t.last_box = detections[j];
        t.last_box.frame = frame;
        t.last_box.camera_id = camera_id_;
        t.hit_streak = 1;
        t.confirmed = params_.min_hits <= 1;
        t.history.camera_id = camera_id_;
        t.history.local_id = t.local_id;
        t.history.confirmed = t.confirmed;
        t.history.obs.emplace(frame, t.last_box);
        tracks_.push_back(std::move(t));
    }
}

void Tracker2D::retire(std::size_t index) {
    if (!tracks_[index].history.obs.empty()) {
        emitted_.push_back(std::move(tracks_[index].history));
    }
    tracks_.erase(tracks_.begin() + static_cast<std::ptrdiff_t>(index));
}

std::vector<Tracklet2D> Tracker2D::finish() {
    while (!tracks_.empty()) retire(tracks_.size() - 1);
    std::sort(emitted_.begin(), emitted_.end(),
              [](const Tracklet2D& a, const Tracklet2D& b) { return a.local_id < b.local_id; });
    return emitted_;
}

std::vector<Tracklet2D> track_camera_stream(
    int camera_id, const std::vector<std::vector<Observation2D>>& frames,
    const TrackerParams& params) {
    Tracker2D tracker(camera_id, params);
    for (std::size_t f = 0; f < frames.size(); ++f) {
        tracker.step(static_cast<int>(f), frames[f]);
    }
    return tracker.finish();
}

}  // namespace mvtrack
