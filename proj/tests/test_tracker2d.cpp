#include <doctest.h>

#include <algorithm>
#include <set>

#include "mvtrack/errors.hpp"
#include "mvtrack/rng.hpp"
#include "mvtrack/tracker2d.hpp"
#include "support/oracles.hpp"

using namespace mvtrack;

namespace {

Observation2D box(double x, double y, double w = 40, double h = 80) {
    Observation2D o;
    o.center = Point2D(x, y);
    o.width = w;
    o.height = h;
    return o;
}

}  // namespace

TEST_CASE("predict advances the box along the velocity") {
    Track2DState s;
    s.last_box = box(10, 10);
    s.velocity << 1, 0, 0, 0;
    CHECK(predict(s).center == Point2D(11, 10));

    s.velocity.setZero();
    const auto same = predict(s);
    CHECK(same.center == s.last_box.center);
    CHECK(same.width == s.last_box.width);

    // Width/height never collapse below one pixel.
    s.velocity << 0, 0, -100, -100;
    const auto clamped = predict(s);
    CHECK(clamped.width == 1.0);
    CHECK(clamped.height == 1.0);
}

TEST_CASE("two-frame history yields the finite-difference velocity") {
    Tracker2D tracker(0);
    tracker.step(0, {box(0, 0)});
    tracker.step(1, {box(2, 2)});
    REQUIRE(tracker.live_tracks().size() == 1);
    const auto pred = predict(tracker.live_tracks()[0]);
    CHECK(pred.center == Point2D(4, 4));
}

TEST_CASE("iou basics") {
    CHECK(iou(box(0, 0, 2, 2), box(0, 0, 2, 2)) == doctest::Approx(1.0));
    CHECK(iou(box(0, 0, 2, 2), box(10, 10, 2, 2)) == 0.0);
    // Unit squares overlapping by half: 0.5 / (1 + 1 - 0.5).
    CHECK(iou(box(0, 0, 1, 1), box(0.5, 0, 1, 1)) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("matched detections extend the track") {
    Tracker2D tracker(0);
    tracker.step(0, {box(100, 100)});
    tracker.step(1, {box(102, 100)});
    REQUIRE(tracker.live_tracks().size() == 1);
    CHECK(tracker.live_tracks()[0].hit_streak == 2);
    CHECK(tracker.live_tracks()[0].confirmed);
    CHECK(tracker.live_tracks()[0].history.obs.size() == 2);
}

TEST_CASE("tracks terminate after max_age unmatched frames") {
    TrackerParams params;
    params.max_age = 3;
    Tracker2D tracker(0, params);
    tracker.step(0, {box(100, 100)});
    tracker.step(1, {box(100, 100)});
    for (int f = 2; f < 2 + params.max_age; ++f) {
        tracker.step(f, {});
        CHECK(tracker.live_tracks().size() == 1);
    }
    tracker.step(2 + params.max_age, {});
    CHECK(tracker.live_tracks().empty());
    CHECK(tracker.emitted().size() == 1);
}

TEST_CASE("frame order is enforced") {
    Tracker2D tracker(0);
    tracker.step(5, {});
    CHECK_THROWS_AS(tracker.step(5, {}), FrameRegressionError);
    CHECK_THROWS_AS(tracker.step(4, {}), FrameRegressionError);
}

TEST_CASE("association equals brute force on a 3x3 instance") {
    Tracker2D tracker(0);
    tracker.step(0, {box(0, 0), box(100, 0), box(200, 0)});
    // Shifted detections: the IoU matrix has a unique optimal assignment.
    const std::vector<Observation2D> dets = {box(202, 0), box(4, 0), box(98, 0)};
    tracker.step(1, dets);

    std::vector<std::vector<double>> cost(3, std::vector<double>(3));
    for (int i = 0; i < 3; ++i) {
        const auto pred = box(i * 100, 0);
        for (int j = 0; j < 3; ++j) {
            const double overlap = iou(pred, dets[j]);
            cost[i][j] = overlap >= 0.3 ? 1.0 - overlap
                                        : std::numeric_limits<double>::infinity();
        }
    }
    const auto [count, best] = oracles::brute_force_matching(
        cost, std::numeric_limits<double>::infinity());
    CHECK(count == 3);

    // All three tracks matched: streaks grew and no new track spawned.
    REQUIRE(tracker.live_tracks().size() == 3);
    for (const auto& t : tracker.live_tracks()) {
        CHECK(t.hit_streak == 2);
        CHECK(t.history.obs.size() == 2);
    }
}

TEST_CASE("no two tracks claim one detection and runs are deterministic") {
    Rng rng(77);
    std::vector<std::vector<Observation2D>> frames(60);
    for (int f = 0; f < 60; ++f) {
        for (int p = 0; p < 4; ++p) {
            if (rng.bernoulli(0.15)) continue;  // occasional miss
            frames[f].push_back(
                box(100 + 150 * p + 2.0 * f + rng.uniform(-3, 3),
                    200 + rng.uniform(-3, 3)));
        }
    }

    const auto run1 = track_camera_stream(0, frames);
    const auto run2 = track_camera_stream(0, frames);
    REQUIRE(run1.size() == run2.size());
    for (std::size_t i = 0; i < run1.size(); ++i) {
        CHECK(run1[i].local_id == run2[i].local_id);
        CHECK(run1[i].obs.size() == run2[i].obs.size());
    }

    // Partial matching: within a frame each observation is used by at most
    // one tracklet. Observations are distinct objects, so compare centers.
    for (int f = 0; f < 60; ++f) {
        std::vector<Point2D> claimed;
        for (const auto& t : run1) {
            if (const auto* o = t.at(f)) claimed.push_back(o->center);
        }
        std::set<std::pair<double, double>> unique;
        for (const auto& c : claimed) unique.insert({c.x(), c.y()});
        CHECK(unique.size() == claimed.size());
    }
}
