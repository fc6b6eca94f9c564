#pragma once

#include <vector>

#include "mvtrack/types.hpp"

namespace mvtrack {

// Sliding-window geometry: size nu, step delta. Adjacent windows overlap by
// nu - delta frames; the linker needs overlap >= 1, so delta < nu.
struct WindowConfig {
    int nu = 30;
    int delta = 20;
};

// Half-open frame range [keyframe - nu/2, keyframe + (nu+1)/2) centered on
// the keyframe.
struct Window {
    int keyframe = 0;
    int start = 0;
    int end = 0;  // exclusive
    std::vector<Tracklet2D> tracklets;

    bool contains(int frame) const { return frame >= start && frame < end; }
};

// Frame range of the window anchored at keyframe k.
std::pair<int, int> window_range(int keyframe, int nu);

// Keyframe sequence covering a stream of T frames: k0 = nu/2, advancing by
// delta while the window start stays within the stream; the final partial
// window is kept.
std::vector<int> keyframes(int stream_length, int nu, int delta);

// Restriction of the tracklets to the window's range; empty crops dropped,
// ids and confirmation flags preserved, gaps left intact.
Window crop(const std::vector<Tracklet2D>& tracklets, int keyframe, int nu);

}  // namespace mvtrack
