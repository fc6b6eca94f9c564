#include "mvtrack/simulator.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "mvtrack/errors.hpp"
#include "mvtrack/rng.hpp"
#include "mvtrack/tracker2d.hpp"

namespace mvtrack {

namespace {

double wrap_angle(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

CameraModel make_camera(int id, const Point3D& center, const Point3D& target,
                        double focal, int width, int height) {
    const Eigen::Vector3d z = (target - center).normalized();
    Eigen::Vector3d x = z.cross(Eigen::Vector3d(0, 0, 1));
    if (x.norm() < 1e-9) x = Eigen::Vector3d(1, 0, 0);
    x.normalize();
    const Eigen::Vector3d y = z.cross(x);

    Eigen::Matrix3d rotation;
    rotation.row(0) = x;
    rotation.row(1) = y;
    rotation.row(2) = z;
    Eigen::Matrix3d intrinsics;
    intrinsics << focal, 0, width / 2.0, 0, focal, height / 2.0, 0, 0, 1;

    CameraModel cam;
    cam.camera_id = id;
    cam.image_width = width;
    cam.image_height = height;
    cam.projection.leftCols<3>() = intrinsics * rotation;
    cam.projection.col(3) = intrinsics * (-rotation * center);
    return cam;
}

// Joint layout: 0 head, 1 neck, 2/3 L/R shoulder, 4/5 elbows, 6/7 wrists,
// 8 pelvis, 9/10 hips, 11/12 knees, 13/14 ankles. Arm and leg segments swing
// by rotation so limb lengths stay fixed per person.
Pose3D skeleton_at(const Point3D& foot, double heading, double phase, double s) {
    const Eigen::Vector3d fwd(std::cos(heading), std::sin(heading), 0.0);
    const Eigen::Vector3d lat(-std::sin(heading), std::cos(heading), 0.0);
    const Eigen::Vector3d up(0, 0, 1);

    Pose3D pose;
    pose.joints.assign(15, Point3D::Zero());
    pose.valid.assign(15, 1);
    auto set = [&](int j, double lateral, double z, double forward = 0.0) {
        pose.joints[j] = foot + lat * (lateral * s) + up * (z * s) + fwd * (forward * s);
    };
    set(0, 0.0, 1.70);
    set(1, 0.0, 1.50);
    set(2, 0.20, 1.45);
    set(3, -0.20, 1.45);
    set(8, 0.0, 1.00);
    set(9, 0.12, 0.95);
    set(10, -0.12, 0.95);

    auto swing = [&](int from, int to, double len, double angle) {
        pose.joints[to] =
            pose.joints[from] + (fwd * std::sin(angle) - up * std::cos(angle)) * (len * s);
    };
    for (int side = 0; side < 2; ++side) {
        const double leg_phase = phase + (side == 0 ? 0.0 : M_PI);
        const double arm_phase = leg_phase + M_PI;  // arms counter-swing
        const double thigh = 0.35 * std::sin(leg_phase);
        const double shin = thigh - 0.6 * std::max(0.0, std::sin(leg_phase));
        swing(9 + side, 11 + side, 0.40, thigh);
        swing(11 + side, 13 + side, 0.47, shin);
        const double upper = 0.40 * std::sin(arm_phase);
        swing(2 + side, 4 + side, 0.28, upper);
        swing(4 + side, 6 + side, 0.25, upper + 0.35);
    }
    return pose;
}

struct Walker {
    Point3D pos = Point3D::Zero();
    double heading = 0.0;
    Point3D waypoint = Point3D::Zero();
    double phase = 0.0;
};

}  // namespace

Scene generate_scene(const SceneConfig& cfg) {
    if (cfg.n_cameras < 2) throw Error("a rig needs at least 2 cameras");
    if (cfg.n_persons < 1 || cfg.duration < 1) throw Error("empty scene");

    Scene scene;
    const Point3D look_at(0, 0, 1.0);
    for (int c = 0; c < cfg.n_cameras; ++c) {
        const double angle = cfg.ring_arc > 0.0 && cfg.n_cameras > 1
                                 ? cfg.ring_arc * c / (cfg.n_cameras - 1)
                                 : 2.0 * M_PI * c / cfg.n_cameras;
        const Point3D center(cfg.ring_radius * std::cos(angle),
                             cfg.ring_radius * std::sin(angle), cfg.camera_height);
        scene.cameras.push_back(make_camera(c, center, look_at, cfg.focal_px,
                                            cfg.image_width, cfg.image_height));
    }

    const double margin = 0.5;
    const double hx = std::max(0.1, cfg.arena_half_x - margin);
    const double hy = std::max(0.1, cfg.arena_half_y - margin);
    const double step = cfg.walk_speed / cfg.fps;

    for (int p = 0; p < cfg.n_persons; ++p) {
        Rng rng(cfg.seed * 0x9e37ULL + 0x51ab2ca70000ULL + static_cast<std::uint64_t>(p));
        Walker w;
        w.pos = Point3D(rng.uniform(-hx, hx), rng.uniform(-hy, hy), 0.0);
        w.heading = rng.uniform(-M_PI, M_PI);
        w.waypoint = Point3D(rng.uniform(-hx, hx), rng.uniform(-hy, hy), 0.0);
        const double scale = std::clamp(rng.gaussian(1.0, 0.04), 0.85, 1.15);
        scene.person_scale.push_back(scale);

        auto& traj = scene.ground_truth.points[p];
        auto& poses = scene.ground_truth.poses;
        for (int f = 0; f < cfg.duration; ++f) {
            const Eigen::Vector2d to_wp = (w.waypoint - w.pos).head<2>();
            if (to_wp.norm() < 0.4) {
                w.waypoint = Point3D(rng.uniform(-hx, hx), rng.uniform(-hy, hy), 0.0);
            }
            const double desired = std::atan2(w.waypoint.y() - w.pos.y(),
                                              w.waypoint.x() - w.pos.x());
            const double turn =
                std::clamp(wrap_angle(desired - w.heading), -cfg.turn_rate, cfg.turn_rate);
            w.heading = wrap_angle(w.heading + turn);
            w.pos.x() = std::clamp(w.pos.x() + step * std::cos(w.heading),
                                   -cfg.arena_half_x, cfg.arena_half_x);
            w.pos.y() = std::clamp(w.pos.y() + step * std::sin(w.heading),
                                   -cfg.arena_half_y, cfg.arena_half_y);
            w.phase += 2.0 * M_PI * step / 0.7;  // stride length 0.7 m

            if (cfg.with_poses) {
                Pose3D pose = skeleton_at(w.pos, w.heading, w.phase, scale);
                Point3D centroid = Point3D::Zero();
                for (const auto& j : pose.joints) centroid += j;
                traj.emplace(f, centroid / 15.0);
                poses[p].emplace(f, std::move(pose));
            } else {
                traj.emplace(f, w.pos);
            }
        }
    }
    return scene;
}

namespace {

bool inside_image(const CameraModel& cam, const Point2D& px) {
    return px.x() >= 0.0 && px.x() < cam.image_width && px.y() >= 0.0 &&
           px.y() < cam.image_height;
}

}  // namespace

RenderResult render_detections(const Scene& scene, const SceneConfig& cfg,
                               const NoiseConfig& noise) {
    RenderResult out;
    const int n_cams = static_cast<int>(scene.cameras.size());
    out.detections.assign(n_cams, {});
    out.labeled.assign(n_cams, {});
    Rng rng(noise.seed * 0x2545f4914f6cdd1dULL + 0xb5ULL);

    for (int c = 0; c < n_cams; ++c) {
        const CameraModel& cam = scene.cameras[c];
        out.detections[c].assign(cfg.duration, {});
        std::vector<Tracklet2D> labeled(cfg.n_persons);
        for (int p = 0; p < cfg.n_persons; ++p) {
            labeled[p].camera_id = c;
            labeled[p].local_id = p;
        }

        for (int f = 0; f < cfg.duration; ++f) {
            struct Pending {
                int person;
                Observation2D obs;
                double depth;
            };
            std::vector<Pending> pending;

            for (int p = 0; p < cfg.n_persons; ++p) {
                const auto& traj = scene.ground_truth.points.at(p);
                auto it = traj.find(f);
                if (it == traj.end()) continue;

                Observation2D obs;
                obs.frame = f;
                obs.camera_id = c;
                double depth = 0.0;

                if (cfg.with_poses) {
                    const Pose3D& pose = scene.ground_truth.poses.at(p).at(f);
                    obs.keypoints.assign(15, Point2D::Zero());
                    obs.kp_valid.assign(15, 0);
                    Point2D lo(1e18, 1e18), hi(-1e18, -1e18);
                    int valid = 0;
                    for (int j = 0; j < 15; ++j) {
                        const Projection proj = project(cam, pose.joints[j]);
                        if (proj.behind_camera || !inside_image(cam, proj.pixel)) continue;
                        Point2D px = proj.pixel;
                        if (noise.pixel_sigma > 0.0) {
                            px.x() += rng.gaussian(0.0, noise.pixel_sigma);
                            px.y() += rng.gaussian(0.0, noise.pixel_sigma);
                        }
                        obs.keypoints[j] = px;
                        obs.kp_valid[j] = 1;
                        lo = lo.cwiseMin(px);
                        hi = hi.cwiseMax(px);
                        ++valid;
                    }
                    if (valid < 5) continue;  // person essentially out of view
                    const Point2D size = (hi - lo) * 1.1;
                    obs.center = (lo + hi) / 2.0;
                    obs.width = std::max(8.0, size.x());
                    obs.height = std::max(8.0, size.y());
                    depth = (pose.joints[8] - cam.center()).norm();
                } else {
                    const Point3D foot = it->second;
                    const Projection base = project(cam, foot);
                    if (base.behind_camera || !inside_image(cam, base.pixel)) continue;
                    const Point3D head =
                        foot + Point3D(0, 0, 1.70 * scene.person_scale[p]);
                    const Projection top = project(cam, head);
                    Point2D px = base.pixel;
                    if (noise.pixel_sigma > 0.0) {
                        px.x() += rng.gaussian(0.0, noise.pixel_sigma);
                        px.y() += rng.gaussian(0.0, noise.pixel_sigma);
                    }
                    obs.center = px;
                    obs.height = std::max(8.0, (top.pixel - base.pixel).norm());
                    obs.width = 0.45 * obs.height;
                    depth = (foot - cam.center()).norm();
                }

                if (noise.bbox_scale_jitter > 0.0) {
                    obs.width *= std::max(0.2, 1.0 + rng.gaussian(0.0, noise.bbox_scale_jitter));
                    obs.height *= std::max(0.2, 1.0 + rng.gaussian(0.0, noise.bbox_scale_jitter));
                }
                obs.score = 0.8 + 0.2 * rng.uniform();
                if (noise.miss_rate > 0.0 && rng.bernoulli(noise.miss_rate)) continue;
                pending.push_back({p, std::move(obs), depth});
            }

            // Occlusion rule: of two heavily overlapping boxes the farther
            // one is hidden.
            if (noise.occlusion_iou > 0.0) {
                std::vector<char> hidden(pending.size(), 0);
                for (std::size_t i = 0; i < pending.size(); ++i) {
                    for (std::size_t j = i + 1; j < pending.size(); ++j) {
                        if (hidden[i] || hidden[j]) continue;
                        if (iou(pending[i].obs, pending[j].obs) > noise.occlusion_iou) {
                            hidden[pending[i].depth > pending[j].depth ? i : j] = 1;
                        }
                    }
                }
                std::vector<Pending> kept;
                for (std::size_t i = 0; i < pending.size(); ++i) {
                    if (!hidden[i]) kept.push_back(std::move(pending[i]));
                }
                pending = std::move(kept);
            }

            for (auto& item : pending) {
                labeled[item.person].obs.emplace(f, item.obs);
                out.detections[c][f].push_back(std::move(item.obs));
            }

            if (noise.fp_rate > 0.0 && rng.bernoulli(noise.fp_rate)) {
                Observation2D fp;
                fp.frame = f;
                fp.camera_id = c;
                fp.center = Point2D(rng.uniform(0.0, cam.image_width),
                                    rng.uniform(0.0, cam.image_height));
                // Size drawn from the true boxes in view, so false positives
                // are not separable by scale alone.
                if (!out.detections[c][f].empty()) {
                    const auto& donor = out.detections[c][f][rng.uniform_int(
                        out.detections[c][f].size())];
                    fp.height = donor.height * rng.uniform(0.8, 1.2);
                } else {
                    fp.height = rng.uniform(60.0, 260.0);
                }
                fp.width = 0.45 * fp.height;
                fp.score = 0.5 + 0.3 * rng.uniform();
                if (cfg.with_poses) {
                    fp.keypoints.assign(15, Point2D::Zero());
                    fp.kp_valid.assign(15, 1);
                    for (int j = 0; j < 15; ++j) {
                        fp.keypoints[j] =
                            fp.center + Point2D(rng.gaussian(0.0, fp.width / 4.0),
                                                rng.gaussian(0.0, fp.height / 4.0));
                    }
                }
                out.detections[c][f].push_back(std::move(fp));
            }
        }

        // Rate-based id swaps on the labeled tracklets.
        std::vector<IdSwapEvent> events;
        if (noise.id_swap_rate > 0.0 && cfg.n_persons > 1) {
            for (int p = 0; p < cfg.n_persons; ++p) {
                if (!rng.bernoulli(noise.id_swap_rate)) continue;
                int q = static_cast<int>(rng.uniform_int(cfg.n_persons - 1));
                if (q >= p) ++q;
                const int frame = static_cast<int>(
                    rng.uniform_int(std::max(1, cfg.duration * 6 / 10)) + cfg.duration / 5);
                events.push_back({c, p, q, frame});
            }
        }
        inject_id_swaps(labeled, c, events);
        out.swaps.insert(out.swaps.end(), events.begin(), events.end());

        for (auto& t : labeled) {
            if (!t.obs.empty()) out.labeled[c].push_back(std::move(t));
        }
    }
    return out;
}

void inject_id_swaps(std::vector<Tracklet2D>& tracklets, int camera,
                     const std::vector<IdSwapEvent>& events) {
    std::vector<IdSwapEvent> ordered;
    for (const auto& e : events) {
        if (e.camera == camera) ordered.push_back(e);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const IdSwapEvent& a, const IdSwapEvent& b) { return a.frame < b.frame; });

    auto find = [&](int local_id) -> Tracklet2D* {
        for (auto& t : tracklets) {
            if (t.local_id == local_id) return &t;
        }
        return nullptr;
    };
    for (const auto& e : ordered) {
        Tracklet2D* a = find(e.person_a);
        Tracklet2D* b = find(e.person_b);
        if (!a || !b || a == b) continue;
        std::map<int, Observation2D> tail_a(a->obs.lower_bound(e.frame), a->obs.end());
        std::map<int, Observation2D> tail_b(b->obs.lower_bound(e.frame), b->obs.end());
        a->obs.erase(a->obs.lower_bound(e.frame), a->obs.end());
        b->obs.erase(b->obs.lower_bound(e.frame), b->obs.end());
        a->obs.insert(tail_b.begin(), tail_b.end());
        b->obs.insert(tail_a.begin(), tail_a.end());
    }
}

std::vector<Scenario> degenerate_scenarios() {
    std::vector<Scenario> scenarios;

    {
        Scenario s;
        s.name = "well_conditioned";
        s.scene.n_persons = 3;
        s.scene.duration = 300;
        s.expected = "full coverage by all cameras; no diagnostics";
        scenarios.push_back(s);
    }
    {
        Scenario s;
        s.name = "single_camera_zone";
        s.scene.n_persons = 3;
        s.scene.n_cameras = 2;
        s.scene.duration = 300;
        s.scene.arena_half_x = 6.0;
        s.scene.arena_half_y = 6.0;
        s.scene.ring_radius = 9.0;
        s.scene.ring_arc = M_PI / 3.0;
        s.scene.focal_px = 1600.0;  // narrow field of view
        s.expected =
            "arena edges covered by one camera; EmptyFrame diagnostics and gaps in "
            "the 3D tracklets there";
        scenarios.push_back(s);
    }
    {
        Scenario s;
        s.name = "near_coincident_pair";
        s.scene.n_persons = 2;
        s.scene.n_cameras = 2;
        s.scene.duration = 300;
        s.scene.ring_arc = 0.005;  // centers ~4 cm apart
        s.expected =
            "baseline of a few centimeters; triangulation error several times the "
            "well-conditioned error under pixel noise";
        scenarios.push_back(s);
    }
    {
        Scenario s;
        s.name = "crowded_occlusion";
        s.scene.n_persons = 8;
        s.scene.duration = 300;
        s.scene.arena_half_x = 2.0;
        s.scene.arena_half_y = 2.0;
        s.noise.occlusion_iou = 0.5;
        s.expected = "frequent per-camera occlusion gaps; interpolation infill carries "
                     "the majority vote";
        scenarios.push_back(s);
    }
    return scenarios;
}

}  // namespace mvtrack
