#include <doctest.h>

#include <algorithm>
#include <set>

#include "mvtrack/association.hpp"
#include "mvtrack/errors.hpp"
#include "mvtrack/rng.hpp"
#include "mvtrack/windows.hpp"
#include "support/oracles.hpp"
#include "support/scenes.hpp"

using namespace mvtrack;

namespace {

// Distance matrix with all entries finite, from a symmetric table.
std::vector<std::vector<TrackletDistance>> finite_matrix(
    const std::vector<std::vector<double>>& values) {
    const std::size_t n = values.size();
    std::vector<std::vector<TrackletDistance>> m(
        n, std::vector<TrackletDistance>(n, TrackletDistance::incalculable()));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) m[i][j] = TrackletDistance::finite(values[i][j]);
        }
    }
    return m;
}

Tracklet2D span(int camera, int id, int first, int last) {
    Tracklet2D t;
    t.camera_id = camera;
    t.local_id = id;
    for (int f = first; f <= last; ++f) {
        Observation2D o;
        o.frame = f;
        o.camera_id = camera;
        o.center = Point2D(10.0 * id, 5.0 * f);
        o.width = 40;
        o.height = 90;
        t.obs.emplace(f, o);
    }
    return t;
}

}  // namespace

TEST_CASE("pairwise set distance covers exactly the common frames") {
    auto fixture = scenes::make([] {
        SceneConfig cfg;
        cfg.n_persons = 1;
        cfg.n_cameras = 2;
        cfg.duration = 40;
        return cfg;
    }());
    const auto& cam0 = fixture.rendered.labeled[0][0];
    const auto& cam1 = fixture.rendered.labeled[1][0];

    Tracklet2D a = cam0, b = cam1;
    a.obs.erase(a.obs.begin(), a.obs.find(10));  // a covers 10..39
    b.obs.erase(b.obs.find(13), b.obs.end());    // b covers 0..12
    const auto set = pairwise_set_distance(a, b, fixture.rig, false);
    CHECK(set.size() == 3);  // frames 10, 11, 12

    Tracklet2D c = cam1;
    c.obs.erase(c.obs.find(10), c.obs.end());  // c covers 0..9, disjoint from a
    CHECK(pairwise_set_distance(a, c, fixture.rig, false).empty());

    // Noiseless same-person distances vanish.
    const auto full = pairwise_set_distance(cam0, cam1, fixture.rig, false);
    CHECK(full.size() == 40);
    for (double d : full) CHECK(d <= 1e-9);
}

TEST_CASE("tracklet distance case split") {
    auto fixture = scenes::make([] {
        SceneConfig cfg;
        cfg.n_persons = 2;
        cfg.n_cameras = 2;
        cfg.duration = 30;
        return cfg;
    }());
    const auto& labeled = fixture.rendered.labeled;

    // Same camera, overlapping frames.
    CHECK(tracklet_distance(labeled[0][0], labeled[0][1], fixture.rig, false)
              .is_forbidden());

    // No overlap at all.
    Tracklet2D early = labeled[0][0];
    early.obs.erase(early.obs.find(15), early.obs.end());
    Tracklet2D late = labeled[1][1];
    late.obs.erase(late.obs.begin(), late.obs.find(15));
    CHECK(tracklet_distance(early, late, fixture.rig, false).is_incalculable());

    // Same camera but disjoint in time is still incalculable.
    Tracklet2D late_same_cam = labeled[0][1];
    late_same_cam.obs.erase(late_same_cam.obs.begin(), late_same_cam.obs.find(15));
    CHECK(tracklet_distance(early, late_same_cam, fixture.rig, false)
              .is_incalculable());

    // Cross-camera overlap of the same person: small finite mean.
    const auto d = tracklet_distance(labeled[0][0], labeled[1][0], fixture.rig, false);
    REQUIRE(d.is_finite());
    CHECK(d.value <= 1e-9);
}

TEST_CASE("finite mean matches the set") {
    // S = {0.1, 0.2, 0.3} -> 0.2 via the combine-free path.
    // Checked through pdnc_combine-field arithmetic instead of geometry.
    std::vector<double> set{0.1, 0.2, 0.3};
    double mean = 0.0;
    for (double v : set) mean += v;
    mean /= set.size();
    CHECK(TrackletDistance::finite(mean).value == doctest::Approx(0.2));
}

TEST_CASE("pdnc combine follows the merge case table") {
    const auto fin = [](double v) { return TrackletDistance::finite(v); };
    const auto none = TrackletDistance::incalculable();
    const auto inf = TrackletDistance::forbidden();

    CHECK(pdnc_combine(fin(0.2), fin(0.5)).value == 0.5);
    CHECK(pdnc_combine(none, fin(0.5)).value == 0.5);
    CHECK(pdnc_combine(fin(0.2), none).value == 0.2);
    CHECK(pdnc_combine(none, none).is_incalculable());
    CHECK(pdnc_combine(inf, fin(0.1)).is_forbidden());
    CHECK(pdnc_combine(fin(0.1), inf).is_forbidden());
    CHECK(pdnc_combine(inf, none).is_forbidden());
    CHECK(pdnc_combine(none, inf).is_forbidden());
}

TEST_CASE("pdnc reduces to complete linkage without incalculable entries") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 8;
        std::vector<std::vector<double>> values(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                values[i][j] = values[j][i] = rng.uniform(0.0, 1.0);
            }
        }
        const double lambda = rng.uniform(0.2, 0.8);
        const auto ours = pdnc(finite_matrix(values), lambda);
        const auto oracle = oracles::complete_linkage_oracle(values, lambda);
        CHECK(oracles::as_partition(ours.clusters) == oracles::as_partition(oracle));

        // Monotone safety: every executed merge was below lambda.
        for (const auto& m : ours.audit) CHECK(m.distance < lambda);

        // Partition property.
        std::set<int> seen;
        for (const auto& c : ours.clusters) {
            for (int idx : c) CHECK(seen.insert(idx).second);
        }
        CHECK(seen.size() == static_cast<std::size_t>(n));
    }
}

TEST_CASE("forbidden pairs never merge, even transitively") {
    // Two same-camera overlapping tracklets linked through a third view.
    // d(0,1) forbidden; both are near tracklet 2.
    std::vector<std::vector<TrackletDistance>> m(
        3, std::vector<TrackletDistance>(3, TrackletDistance::incalculable()));
    m[0][1] = m[1][0] = TrackletDistance::forbidden();
    m[0][2] = m[2][0] = TrackletDistance::finite(0.05);
    m[1][2] = m[2][1] = TrackletDistance::finite(0.06);
    const auto out = pdnc(m, 0.5);
    REQUIRE(out.clusters.size() == 2);
    for (const auto& c : out.clusters) {
        CHECK(!(std::count(c.begin(), c.end(), 0) && std::count(c.begin(), c.end(), 1)));
    }

    // Randomized 5-element instances: members of forbidden pairs stay apart
    // under every merge path the greedy order can take.
    Rng rng(37);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 5;
        std::vector<std::vector<TrackletDistance>> d(
            n, std::vector<TrackletDistance>(n, TrackletDistance::incalculable()));
        std::vector<std::pair<int, int>> forbidden;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double roll = rng.uniform();
                if (roll < 0.2) {
                    d[i][j] = d[j][i] = TrackletDistance::forbidden();
                    forbidden.emplace_back(i, j);
                } else if (roll < 0.4) {
                    d[i][j] = d[j][i] = TrackletDistance::incalculable();
                } else {
                    d[i][j] = d[j][i] = TrackletDistance::finite(rng.uniform(0.0, 0.6));
                }
            }
        }
        const auto out2 = pdnc(d, 0.5);
        for (const auto& c : out2.clusters) {
            for (const auto& [a, b] : forbidden) {
                CHECK(!(std::count(c.begin(), c.end(), a) &&
                        std::count(c.begin(), c.end(), b)));
            }
        }
    }
}

TEST_CASE("pdnc is deterministic with lexicographic tie-breaks") {
    std::vector<std::vector<double>> values(4, std::vector<double>(4, 0.9));
    // Two equal-distance candidate pairs; (0,1) must merge first.
    values[0][1] = values[1][0] = 0.1;
    values[2][3] = values[3][2] = 0.1;
    const auto out = pdnc(finite_matrix(values), 0.5);
    REQUIRE(out.audit.size() == 2);
    CHECK(out.audit[0].cluster_a == 0);
    CHECK(out.audit[0].cluster_b == 1);
    CHECK(out.audit[1].cluster_a == 2);
    CHECK(out.audit[1].cluster_b == 3);
}

TEST_CASE("a split same-camera tracklet rejoins its person through propagation") {
    // Two people watched by four cameras inside one 30-frame window. Person 0
    // leaves the scene at frame 20; camera 1 misses person 0 entirely and
    // sees person 1 as two disjoint fragments (frames 0..14 and 21..29), so
    // the fragments' mutual distance is incalculable and only distance
    // propagation can pull the later fragment into the right cluster.
    auto fixture = scenes::make([] {
        SceneConfig cfg;
        cfg.n_persons = 2;
        cfg.n_cameras = 4;
        cfg.duration = 30;
        cfg.seed = 77;
        return cfg;
    }());

    auto restricted = [&](int camera, int person, int first, int last) {
        Tracklet2D t = *std::find_if(
            fixture.rendered.labeled[camera].begin(),
            fixture.rendered.labeled[camera].end(),
            [&](const Tracklet2D& x) { return x.local_id == person; });
        t.obs.erase(t.obs.begin(), t.obs.lower_bound(first));
        t.obs.erase(t.obs.upper_bound(last), t.obs.end());
        return t;
    };

    std::vector<Tracklet2D> tracklets;
    tracklets.push_back(restricted(0, 0, 0, 19));   // 0: person 0, camera 0
    tracklets.push_back(restricted(0, 1, 0, 29));   // 1: person 1, camera 0
    tracklets.push_back(restricted(1, 1, 0, 14));   // 2: person 1, camera 1 (early)
    tracklets.push_back(restricted(1, 1, 21, 29));  // 3: person 1, camera 1 (late)
    tracklets.push_back(restricted(2, 0, 0, 19));   // 4: person 0, camera 2
    tracklets.push_back(restricted(2, 1, 0, 29));   // 5: person 1, camera 2
    tracklets.push_back(restricted(3, 0, 0, 19));   // 6: person 0, camera 3
    tracklets.push_back(restricted(3, 1, 0, 29));   // 7: person 1, camera 3

    const auto matrix = distance_matrix(tracklets, fixture.rig, false);
    CHECK(matrix[2][3].is_incalculable());  // same camera, disjoint frames
    CHECK(matrix[0][3].is_incalculable());  // person 0 is gone before frame 21
    CHECK(matrix[0][1].is_forbidden());
    REQUIRE(matrix[1][3].is_finite());
    CHECK(matrix[1][3].value <= 1e-9);

    const auto out = pdnc(matrix, 0.5);
    CHECK(oracles::as_partition(out.clusters) ==
          oracles::as_partition({{0, 4, 6}, {1, 2, 3, 5, 7}}));
}

TEST_CASE("windowed scene clusters are camera-exclusive and complete") {
    auto fixture = scenes::make(
        [] {
            SceneConfig cfg;
            cfg.n_persons = 4;
            cfg.n_cameras = 4;
            cfg.duration = 60;
            cfg.seed = 5;
            return cfg;
        }(),
        [] {
            NoiseConfig noise;
            noise.pixel_sigma = 1.5;
            noise.miss_rate = 0.05;
            noise.seed = 6;
            return noise;
        }());

    const auto tracklets = scenes::all_labeled(fixture.rendered);
    const Window win = crop(tracklets, 30, 30);
    const auto matrix = distance_matrix(win.tracklets, fixture.rig, false);
    const auto out = pdnc(matrix, 0.3);

    // Exactly one cluster per person, each holding one tracklet per camera.
    CHECK(out.clusters.size() == 4);
    for (const auto& cluster : out.clusters) {
        std::set<std::pair<int, int>> cam_frames;
        for (int idx : cluster) {
            const auto& t = win.tracklets[idx];
            for (const auto& [f, o] : t.obs) {
                CHECK(cam_frames.insert({t.camera_id, f}).second);
            }
        }
    }
}
