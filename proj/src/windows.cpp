#include "mvtrack/windows.hpp"

#include "mvtrack/errors.hpp"

namespace mvtrack {

std::pair<int, int> window_range(int keyframe, int nu) {
    return {keyframe - nu / 2, keyframe + (nu + 1) / 2};
}

std::vector<int> keyframes(int stream_length, int nu, int delta) {
    if (stream_length < 1) throw Error("stream length must be >= 1");
    if (nu < 1 || delta < 1) throw Error("window size and step must be >= 1");
    std::vector<int> keys;
    for (int k = nu / 2; k - nu / 2 <= stream_length - 1; k += delta) {
        keys.push_back(k);
    }
    return keys;
}

Window crop(const std::vector<Tracklet2D>& tracklets, int keyframe, int nu) {
    Window w;
    w.keyframe = keyframe;
    std::tie(w.start, w.end) = window_range(keyframe, nu);
    for (const auto& t : tracklets) {
        Tracklet2D cropped;
        cropped.camera_id = t.camera_id;
        cropped.local_id = t.local_id;
        cropped.confirmed = t.confirmed;
        for (auto it = t.obs.lower_bound(w.start); it != t.obs.end() && it->first < w.end;
             ++it) {
            cropped.obs.emplace(it->first, it->second);
        }
        if (!cropped.obs.empty()) {
            w.tracklets.push_back(std::move(cropped));
        }
    }
    return w;
}

}  // namespace mvtrack
