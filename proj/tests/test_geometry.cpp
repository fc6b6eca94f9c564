#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "mvtrack/errors.hpp"
#include "mvtrack/geometry.hpp"
#include "mvtrack/rng.hpp"
#include "support/oracles.hpp"

using namespace mvtrack;

namespace {

std::vector<CameraModel> ring_rig(int n, double radius, double focal = 1000.0) {
    std::vector<CameraModel> cams;
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * M_PI * i / n;
        cams.push_back(oracles::make_camera(i,
                                            Point3D(radius * std::cos(a),
                                                    radius * std::sin(a), 2.5),
                                            Point3D(0, 0, 1), focal, 960, 540));
    }
    return cams;
}

Observation2D obs_at(int camera, const Point2D& center, double w, double h) {
    Observation2D o;
    o.camera_id = camera;
    o.center = center;
    o.width = w;
    o.height = h;
    return o;
}

}  // namespace

TEST_CASE("fundamental matrix satisfies the epipolar identity") {
    const auto cams = ring_rig(2, 5.0);
    const auto pair = fundamental_from_projections(cams[0], cams[1]);

    const Point3D X(0.5, -0.3, 1.2);
    const Point2D xi = oracles::project_oracle(cams[0], X);
    const Point2D xj = oracles::project_oracle(cams[1], X);
    Eigen::Vector3d hi(xi.x(), xi.y(), 1.0), hj(xj.x(), xj.y(), 1.0);
    hi.normalize();
    hj.normalize();
    CHECK(std::abs(hj.dot(pair.F * hi)) <= 1e-9);
}

TEST_CASE("coincident camera centers are rejected") {
    const auto cams = ring_rig(2, 5.0);
    CHECK_THROWS_AS(fundamental_from_projections(cams[0], cams[0]), DegenerateRigError);
}

TEST_CASE("random rig keeps epipolar residuals tiny over sampled points") {
    const auto cams = ring_rig(4, 6.0);
    const CameraRig rig(cams);
    Rng rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Point3D X(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5),
                        rng.uniform(0.0, 2.0));
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                if (i == j) continue;
                const Point2D xi = oracles::project_oracle(cams[i], X);
                const Point2D xj = oracles::project_oracle(cams[j], X);
                Eigen::Vector3d hi(xi.x(), xi.y(), 1.0), hj(xj.x(), xj.y(), 1.0);
                hi.normalize();
                hj.normalize();
                worst = std::max(worst,
                                 std::abs(hj.dot(rig.fundamental(i, j).F * hi)));
            }
        }
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("produced F is rank 2 and transposes across directions") {
    const CameraRig rig(ring_rig(4, 6.0));
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            const Eigen::Matrix3d& F = rig.fundamental(i, j).F;
            const Eigen::JacobiSVD<Eigen::Matrix3d> svd(F);
            CHECK(svd.singularValues()(2) <= 1e-8 * svd.singularValues()(0));
            CHECK((F - rig.fundamental(j, i).F.transpose()).norm() == 0.0);
        }
    }
}

TEST_CASE("epipolar line basics") {
    Eigen::Matrix3d F = Eigen::Matrix3d::Zero();
    F(0, 0) = F(1, 1) = 1.0;
    CHECK_THROWS_AS(epipolar_line(F, Point2D(0, 0)), NullLineError);

    const auto cams = ring_rig(2, 5.0);
    const auto pair = fundamental_from_projections(cams[0], cams[1]);
    const Point3D X(0.2, 0.4, 1.1);
    const Point2D xi = oracles::project_oracle(cams[0], X);
    const Point2D xj = oracles::project_oracle(cams[1], X);
    const Line2D l = epipolar_line(pair.F, xi);
    CHECK(point_line_distance(xj, l) <= 1e-9);

    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const Point2D x(rng.uniform(-500, 500), rng.uniform(-500, 500));
        const Line2D line = epipolar_line(pair.F, x);
        const Eigen::Vector3d expect = pair.F * Eigen::Vector3d(x.x(), x.y(), 1.0);
        CHECK(line.a == expect(0));
        CHECK(line.b == expect(1));
        CHECK(line.c == expect(2));
    }
}

TEST_CASE("point-line distance formula") {
    CHECK(point_line_distance(Point2D(1, 1), {0, 1, -1}) == 0.0);
    CHECK(point_line_distance(Point2D(0, 2), {0, 1, -1}) == 1.0);
    CHECK_THROWS_AS(point_line_distance(Point2D(0, 0), {0, 0, 1}), NullLineError);

    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        const Point2D x(rng.uniform(-10, 10), rng.uniform(-10, 10));
        const Line2D l{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        if (l.a == 0.0 && l.b == 0.0) continue;
        const double expect =
            std::abs(l.a * x.x() + l.b * x.y() + l.c) / std::hypot(l.a, l.b);
        CHECK(std::abs(point_line_distance(x, l) - expect) <= 1e-12);
    }
}

TEST_CASE("normalized pair distance is zero for consistent pairs and symmetric") {
    const auto cams = ring_rig(2, 5.0);
    const auto pair = fundamental_from_projections(cams[0], cams[1]);
    const Point3D X(0.4, 0.1, 1.3);
    Observation2D a = obs_at(0, oracles::project_oracle(cams[0], X), 60, 160);
    Observation2D b = obs_at(1, oracles::project_oracle(cams[1], X), 55, 150);

    CHECK(normalized_pair_distance(a, b, pair) <= 1e-9);

    a.center += Point2D(4.0, -2.0);
    b.center += Point2D(-1.0, 3.0);
    CHECK(normalized_pair_distance(a, b, pair) ==
          normalized_pair_distance(b, a, pair));

    Observation2D degenerate = a;
    degenerate.width = 0.0;
    degenerate.height = 0.0;
    CHECK_THROWS_AS(normalized_pair_distance(degenerate, b, pair), DegenerateBoxError);
}

TEST_CASE("normalization makes the distance range-invariant") {
    // Same relative detection error at 4 m and 8 m from the camera: the
    // normalized value barely moves while the raw epipolar distance roughly
    // halves when the boxes shrink with range.
    const auto cam_a = oracles::make_camera(0, Point3D(0, 0, 1.6), Point3D(10, 0, 1.0),
                                            1000, 960, 540);
    const auto cam_b = oracles::make_camera(1, Point3D(1.5, 2.5, 1.6),
                                            Point3D(10, 0, 1.0), 1000, 960, 540);
    const auto pair = fundamental_from_projections(cam_a, cam_b);

    auto sample = [&](double depth) {
        const Point3D foot(depth, 0.4, 0.0);
        const Point3D head(depth, 0.4, 1.7);
        Observation2D a, b;
        a.camera_id = 0;
        b.camera_id = 1;
        a.center = oracles::project_oracle(cam_a, foot);
        b.center = oracles::project_oracle(cam_b, foot);
        a.height = (oracles::project_oracle(cam_a, head) - a.center).norm();
        b.height = (oracles::project_oracle(cam_b, head) - b.center).norm();
        a.width = 0.45 * a.height;
        b.width = 0.45 * b.height;
        // Detection error fixed at 10% of the box width in each view,
        // applied across the partner's epipolar line so the error is not
        // hidden along the line itself.
        auto offset_across = [&](Observation2D& target, const Observation2D& source,
                                 const Eigen::Matrix3d& F_source_to_target) {
            const Line2D l = epipolar_line(F_source_to_target, source.center);
            const Point2D normal =
                Point2D(l.a, l.b) / std::hypot(l.a, l.b);
            target.center += 0.10 * target.width * normal;
        };
        const Observation2D a0 = a, b0 = b;
        offset_across(a, b0, Eigen::Matrix3d(pair.F.transpose()));
        offset_across(b, a0, pair.F);

        const Line2D lb = epipolar_line(pair.F, a.center);
        const Line2D la = epipolar_line(pair.F.transpose().eval(), b.center);
        const double raw = point_line_distance(a.center, la) +
                           point_line_distance(b.center, lb);
        return std::make_pair(normalized_pair_distance(a, b, pair), raw);
    };

    const auto [norm_near, raw_near] = sample(4.0);
    const auto [norm_far, raw_far] = sample(8.0);
    const double norm_rel = std::abs(norm_near - norm_far) /
                            std::max(norm_near, norm_far);
    CHECK(norm_rel <= 0.25);
    CHECK(std::max(raw_near, raw_far) / std::min(raw_near, raw_far) >= 1.5);
}

TEST_CASE("pose pair distance averages jointly valid joints") {
    const auto cams = ring_rig(2, 5.0);
    const CameraRig rig(cams);
    const auto& pair = rig.fundamental(0, 1);

    Observation2D a, b;
    a.camera_id = 0;
    b.camera_id = 1;
    a.keypoints.resize(15);
    b.keypoints.resize(15);
    a.kp_valid.assign(15, 1);
    b.kp_valid.assign(15, 1);
    Rng rng(9);
    for (int j = 0; j < 15; ++j) {
        const Point3D J(0.3 + 0.02 * j, -0.2 + 0.03 * j, 0.8 + 0.05 * j);
        a.keypoints[j] = oracles::project_oracle(cams[0], J);
        b.keypoints[j] = oracles::project_oracle(cams[1], J);
    }
    auto fit_box = [](Observation2D& o) {
        Point2D lo = o.keypoints[0], hi = o.keypoints[0];
        for (const auto& k : o.keypoints) {
            lo = lo.cwiseMin(k);
            hi = hi.cwiseMax(k);
        }
        o.center = (lo + hi) / 2;
        o.width = std::max(1.0, (hi - lo).x());
        o.height = std::max(1.0, (hi - lo).y());
    };
    fit_box(a);
    fit_box(b);

    CHECK(pose_pair_distance(a, b, pair) <= 1e-9);

    // Per-joint noise: the mean must equal an explicit per-joint loop.
    for (int j = 0; j < 15; ++j) {
        a.keypoints[j] += Point2D(rng.uniform(-3, 3), rng.uniform(-3, 3));
        b.keypoints[j] += Point2D(rng.uniform(-3, 3), rng.uniform(-3, 3));
    }
    a.kp_valid[4] = 0;  // one joint invalid in view a -> mean over the rest

    double expected = 0.0;
    int used = 0;
    for (int j = 0; j < 15; ++j) {
        if (!a.kp_valid[j] || !b.kp_valid[j]) continue;
        Observation2D ja = a, jb = b;
        ja.center = a.keypoints[j];
        jb.center = b.keypoints[j];
        expected += normalized_pair_distance(ja, jb, pair);
        ++used;
    }
    expected /= used;
    CHECK(used == 14);
    CHECK(std::abs(pose_pair_distance(a, b, pair) - expected) <= 1e-12);

    Observation2D empty_a = a;
    empty_a.kp_valid.assign(15, 0);
    CHECK_THROWS_AS(pose_pair_distance(empty_a, b, pair), NoCommonJointsError);
}

TEST_CASE("triangulation closes the projection roundtrip") {
    const auto cams = ring_rig(3, 6.0);
    const Point3D X(1.0, 2.0, 1.5);
    const Point2D a = oracles::project_oracle(cams[0], X);
    const Point2D b = oracles::project_oracle(cams[1], X);
    const TriangulationResult tri = triangulate_pair(a, b, cams[0], cams[1]);
    CHECK((tri.point - X).norm() <= 1e-6);

    const Projection back = project(cams[0], tri.point);
    CHECK((back.pixel - a).norm() <= 1e-6);

    CHECK_THROWS_AS(triangulate_pair(a, a, cams[0], cams[0]), DegenerateBaselineError);
}

TEST_CASE("svd triangulation is competitive with a midpoint oracle under noise") {
    const auto cam_a =
        oracles::make_camera(0, Point3D(-3, 0, 1.8), Point3D(0, 5, 1.2), 1000, 960, 540);
    const auto cam_b =
        oracles::make_camera(1, Point3D(3, 0, 1.8), Point3D(0, 5, 1.2), 1000, 960, 540);

    Rng rng(17);
    std::vector<double> err_svd, err_mid;
    for (int t = 0; t < 500; ++t) {
        const Point3D X(rng.uniform(-1.5, 1.5), 5.0 + rng.uniform(-0.5, 0.5),
                        rng.uniform(0.2, 1.8));
        Point2D a = oracles::project_oracle(cam_a, X);
        Point2D b = oracles::project_oracle(cam_b, X);
        a += Point2D(rng.gaussian(0, 2), rng.gaussian(0, 2));
        b += Point2D(rng.gaussian(0, 2), rng.gaussian(0, 2));

        err_svd.push_back((triangulate_pair(a, b, cam_a, cam_b).point - X).norm());
        const auto mid = oracles::midpoint_triangulation(a, b, cam_a, cam_b);
        REQUIRE(mid.has_value());
        err_mid.push_back((*mid - X).norm());
    }
    auto median = [](std::vector<double> v) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
    };
    // Within 10% of the midpoint oracle, or better.
    CHECK(median(err_svd) <= 1.10 * median(err_mid));
}

TEST_CASE("projection basics and oracle agreement") {
    CameraModel ident;
    ident.camera_id = 0;
    ident.projection << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0;
    CHECK(project(ident, Point3D(0, 0, 1)).pixel == Point2D(0, 0));
    CHECK(project(ident, Point3D(2, 4, 2)).pixel == Point2D(1, 2));
    CHECK(project(ident, Point3D(0, 0, -1)).behind_camera);

    const auto cams = ring_rig(3, 6.0);
    Rng rng(23);
    for (int t = 0; t < 50; ++t) {
        const Point3D X(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 2));
        const auto p = project(cams[t % 3], X);
        CHECK((p.pixel - oracles::project_oracle(cams[t % 3], X)).norm() <= 1e-12);
    }
}
