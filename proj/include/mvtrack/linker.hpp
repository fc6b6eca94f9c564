#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mvtrack/assignment.hpp"
#include "mvtrack/triangulation.hpp"
#include "mvtrack/types.hpp"

namespace mvtrack {

struct LinkerParams {
    double gate = 0.5;          // meters; maximum accepted tracklet distance
    int max_window_misses = 1;  // unmatched windows before termination
};

// Long-term trajectory composed from matched window tracklets.
struct LongTrack {
    int global_id = 0;
    std::map<int, Point3D> points;
    std::map<int, Pose3D> poses;
    int last_keyframe = 0;
    int misses = 0;
};

// Mean Euclidean distance over the overlapping frames of two 3D tracklets
// (pose mode: mean over jointly valid joints, then frames). nullopt when the
// tracklets share no usable frame.
std::optional<double> tracklet3d_distance(const Tracklet3D& a, const Tracklet3D& b);

// Rectangular min-cost matching gated at `gate`; incompatible entries can
// never match.
MatchResult assign(const std::vector<std::vector<std::optional<double>>>& distances,
                   double gate);

// Sequential consumer of per-window 3D tracklets. Matched tracklets extend
// their long track (overlap frames take the newer window's positions);
// unmatched new tracklets start fresh global ids; long tracks unmatched for
// max_window_misses windows are finalized.
class TrackLinker {
public:
    explicit TrackLinker(LinkerParams params = {});

    // Throws OutOfOrderWindowError when keyframes do not advance.
    void link(int keyframe, const std::vector<Tracklet3D>& window_tracklets);

    // Finalizes everything still live and returns all finished tracks,
    // ordered by global id.
    std::vector<LongTrack> finish();

    const std::vector<LongTrack>& live() const { return live_; }

private:
    std::optional<double> track_to_tracklet_distance(const LongTrack& track,
                                                     const Tracklet3D& tracklet) const;
    void absorb(LongTrack& track, const Tracklet3D& tracklet);

    LinkerParams params_;
    int next_global_id_ = 0;
    std::optional<int> last_keyframe_;
    std::vector<LongTrack> live_;
    std::vector<LongTrack> finished_;
};

}  // namespace mvtrack
