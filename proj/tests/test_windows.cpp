#include <doctest.h>

#include "mvtrack/windows.hpp"

using namespace mvtrack;

namespace {

Tracklet2D span_tracklet(int camera, int id, int first, int last) {
    Tracklet2D t;
    t.camera_id = camera;
    t.local_id = id;
    for (int f = first; f <= last; ++f) {
        Observation2D o;
        o.frame = f;
        o.camera_id = camera;
        o.width = o.height = 10;
        t.obs.emplace(f, o);
    }
    return t;
}

}  // namespace

TEST_CASE("crop restricts to the window range") {
    const auto t = span_tracklet(0, 1, 0, 100);
    const Window w = crop({t}, 50, 30);
    CHECK(w.start == 35);
    CHECK(w.end == 65);
    REQUIRE(w.tracklets.size() == 1);
    CHECK(w.tracklets[0].obs.size() == 30);
    CHECK(w.tracklets[0].first_frame() == 35);
    CHECK(w.tracklets[0].last_frame() == 64);
    CHECK(w.tracklets[0].local_id == 1);
}

TEST_CASE("tracklets outside the range are omitted") {
    const auto t = span_tracklet(0, 1, 200, 250);
    const Window w = crop({t}, 50, 30);
    CHECK(w.tracklets.empty());
}

TEST_CASE("gaps survive cropping") {
    auto t = span_tracklet(0, 1, 30, 70);
    for (int f = 44; f <= 48; ++f) t.obs.erase(f);
    const Window w = crop({t}, 50, 30);
    REQUIRE(w.tracklets.size() == 1);
    // Set intersection of the span minus the gap with [35, 65).
    CHECK(w.tracklets[0].obs.size() == static_cast<std::size_t>(30 - 5));
    for (int f = 44; f <= 48; ++f) CHECK(w.tracklets[0].at(f) == nullptr);
}

TEST_CASE("cropping is idempotent") {
    auto t = span_tracklet(0, 1, 0, 100);
    t.obs.erase(40);
    const Window once = crop({t}, 50, 30);
    const Window twice = crop(once.tracklets, 50, 30);
    REQUIRE(twice.tracklets.size() == 1);
    CHECK(once.tracklets[0].obs.size() == twice.tracklets[0].obs.size());
}

TEST_CASE("keyframe schedule") {
    CHECK(keyframes(100, 30, 20) == std::vector<int>{15, 35, 55, 75, 95});
    CHECK(keyframes(10, 30, 20) == std::vector<int>{15});

    const auto ks = keyframes(600, 50, 30);
    CHECK(ks.size() == 20);
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        const auto [s0, e0] = window_range(ks[i], 50);
        const auto [s1, e1] = window_range(ks[i + 1], 50);
        CHECK(e0 - s1 == 20);  // overlap nu - delta
    }
}

TEST_CASE("windows cover the whole stream") {
    for (int T : {1, 7, 29, 30, 31, 100, 601}) {
        for (auto [nu, delta] : {std::pair{30, 20}, {50, 30}, {8, 3}}) {
            std::vector<char> covered(T, 0);
            for (int k : keyframes(T, nu, delta)) {
                const auto [s, e] = window_range(k, nu);
                for (int f = std::max(0, s); f < std::min(T, e); ++f) covered[f] = 1;
            }
            int missing = 0;
            for (char c : covered) missing += c ? 0 : 1;
            CHECK(missing == 0);
        }
    }
}
