#include "mvtrack/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mvtrack/errors.hpp"
#include "mvtrack/rng.hpp"

namespace mvtrack {

namespace {

Observation2D lerp_obs(const Observation2D& a, const Observation2D& b, int frame) {
    const double alpha = static_cast<double>(frame - a.frame) /
                         static_cast<double>(b.frame - a.frame);
    Observation2D o;
    o.frame = frame;
    o.camera_id = a.camera_id;
    o.center = (1.0 - alpha) * a.center + alpha * b.center;
    o.width = (1.0 - alpha) * a.width + alpha * b.width;
    o.height = (1.0 - alpha) * a.height + alpha * b.height;
    o.score = std::clamp((1.0 - alpha) * a.score + alpha * b.score, 0.0, 1.0);
    o.synthetic = true;
    if (a.has_keypoints() && b.has_keypoints() &&
        a.keypoints.size() == b.keypoints.size()) {
        o.keypoints.resize(a.keypoints.size(), Point2D::Zero());
        o.kp_valid.assign(a.keypoints.size(), 0);
        for (std::size_t j = 0; j < a.keypoints.size(); ++j) {
            if (!a.kp_valid[j] || !b.kp_valid[j]) continue;
            o.keypoints[j] = (1.0 - alpha) * a.keypoints[j] + alpha * b.keypoints[j];
            o.kp_valid[j] = 1;
        }
    }
    return o;
}

}  // namespace

std::vector<std::pair<const Observation2D*, bool>> InterpolatedTracklet::entries_at(
    int frame) const {
    std::vector<std::pair<const Observation2D*, bool>> entries;
    if (const Observation2D* obs = base.at(frame)) {
        entries.emplace_back(obs, false);
    }
    if (auto it = infill.find(frame); it != infill.end()) {
        entries.emplace_back(&it->second, true);
    }
    return entries;
}

InterpolatedTracklet interpolate_tracklet(const Tracklet2D& tracklet, int phi,
                                          int window_start, int window_end) {
    if (phi < 1) throw Error("interpolation window must be >= 1");
    InterpolatedTracklet out;
    out.base = tracklet;
    if (tracklet.obs.empty()) return out;

    // Gap infill: a missing frame gets a linear blend of its nearest observed
    // neighbors when both lie within phi frames. Never extrapolates.
    for (int t = std::max(window_start, tracklet.first_frame());
         t < std::min(window_end, tracklet.last_frame() + 1); ++t) {
        if (tracklet.obs.count(t)) continue;
        auto next_it = tracklet.obs.upper_bound(t);
        if (next_it == tracklet.obs.end() || next_it == tracklet.obs.begin()) continue;
        auto prev_it = std::prev(next_it);
        if (t - prev_it->first > phi || next_it->first - t > phi) continue;
        out.infill.emplace(t, lerp_obs(prev_it->second, next_it->second, t));
    }

    // The interpolant evaluated at an observed frame reproduces the
    // observation; keep it as a second, synthetic-tagged candidate so every
    // observed frame also contributes infill vote mass.
    for (const auto& [t, obs] : tracklet.obs) {
        if (t < window_start || t >= window_end) continue;
        Observation2D duplicate = obs;
        duplicate.synthetic = true;
        out.infill.emplace(t, std::move(duplicate));
    }
    return out;
}

namespace {

struct EntryPoint {
    Point2D point;
    int camera;
    bool synthetic;
    double scale;  // w + h of the source observation
};

// Entry points at one frame; joint < 0 selects box centers.
std::vector<EntryPoint> collect_entries(const std::vector<InterpolatedTracklet>& cluster,
                                        int frame, int joint, bool* any_observed) {
    std::vector<EntryPoint> points;
    if (any_observed) *any_observed = false;
    for (const auto& t : cluster) {
        for (const auto& [obs, synthetic] : t.entries_at(frame)) {
            if (joint >= 0) {
                if (static_cast<std::size_t>(joint) >= obs->keypoints.size() ||
                    !obs->kp_valid[joint]) {
                    continue;
                }
                points.push_back({obs->keypoints[joint], obs->camera_id, synthetic,
                                  obs->scale()});
            } else {
                points.push_back({obs->center, obs->camera_id, synthetic, obs->scale()});
            }
            if (any_observed && !synthetic) *any_observed = true;
        }
    }
    return points;
}

int distinct_cameras(const std::vector<EntryPoint>& entries) {
    std::set<int> cams;
    for (const auto& e : entries) cams.insert(e.camera);
    return static_cast<int>(cams.size());
}

std::vector<Candidate> triangulate_all_pairs(const std::vector<EntryPoint>& entries,
                                             const CameraRig& rig) {
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            if (entries[i].camera == entries[j].camera) continue;
            try {
                const TriangulationResult tri =
                    triangulate_pair(entries[i].point, entries[j].point,
                                     rig.camera(entries[i].camera),
                                     rig.camera(entries[j].camera));
                candidates.push_back({tri.point, entries[i].camera, entries[j].camera,
                                      entries[i].synthetic, entries[j].synthetic,
                                      tri.residual});
            } catch (const DegenerateBaselineError&) {
            } catch (const InfinitePointError&) {
            }
        }
    }
    return candidates;
}

CandidateSet candidates_from_entries(const std::vector<EntryPoint>& entries, int frame,
                                     const CameraRig& rig) {
    if (distinct_cameras(entries) < 2) {
        throw EmptyFrameError("fewer than two cameras contribute at frame " +
                              std::to_string(frame));
    }
    CandidateSet set;
    set.frame = frame;
    set.candidates = triangulate_all_pairs(entries, rig);
    return set;
}

}  // namespace

CandidateSet candidate_positions(const std::vector<InterpolatedTracklet>& cluster,
                                 int frame, const CameraRig& rig) {
    return candidates_from_entries(collect_entries(cluster, frame, -1, nullptr), frame,
                                   rig);
}

CandidateSet candidate_positions_joint(const std::vector<InterpolatedTracklet>& cluster,
                                       int frame, int joint, const CameraRig& rig) {
    return candidates_from_entries(collect_entries(cluster, frame, joint, nullptr),
                                   frame, rig);
}

std::vector<std::vector<int>> complete_linkage_3d(const std::vector<Point3D>& points,
                                                  double kappa) {
    const int n = static_cast<int>(points.size());
    if (n == 0) throw Error("complete_linkage_3d requires at least one point");
    if (!(kappa > 0.0)) throw Error("kappa must be positive");

    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            d[i][j] = d[j][i] = (points[i] - points[j]).norm();
        }
    }
    std::vector<std::vector<int>> members(n);
    std::vector<char> active(n, 1);
    for (int i = 0; i < n; ++i) members[i] = {i};

    while (true) {
        int best_i = -1, best_j = -1;
        double best = kappa;
        for (int i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (int j = i + 1; j < n; ++j) {
                if (active[j] && d[i][j] < best) {
                    best = d[i][j];
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_i < 0) break;
        for (int q = 0; q < n; ++q) {
            if (!active[q] || q == best_i || q == best_j) continue;
            d[best_i][q] = d[q][best_i] = std::max(d[best_i][q], d[best_j][q]);
        }
        auto& dst = members[best_i];
        dst.insert(dst.end(), members[best_j].begin(), members[best_j].end());
        std::sort(dst.begin(), dst.end());
        members[best_j].clear();
        active[best_j] = 0;
    }

    std::vector<std::vector<int>> clusters;
    for (int i = 0; i < n; ++i) {
        if (active[i]) clusters.push_back(std::move(members[i]));
    }
    return clusters;
}

FusedPoint fuse_largest(const std::vector<std::vector<int>>& clusters,
                        const std::vector<Point3D>& points, double kappa) {
    if (clusters.empty()) throw Error("fuse_largest requires at least one cluster");

    auto mean_spread = [&](const std::vector<int>& c) {
        if (c.size() < 2) return 0.0;
        double sum = 0.0;
        int pairs = 0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            for (std::size_t j = i + 1; j < c.size(); ++j) {
                sum += (points[c[i]] - points[c[j]]).norm();
                ++pairs;
            }
        }
        return sum / pairs;
    };

    int best = 0;
    double best_spread = mean_spread(clusters[0]);
    for (std::size_t i = 1; i < clusters.size(); ++i) {
        if (clusters[i].size() < clusters[best].size()) continue;
        if (clusters[i].size() > clusters[best].size()) {
            best = static_cast<int>(i);
            best_spread = mean_spread(clusters[i]);
            continue;
        }
        const double spread = mean_spread(clusters[i]);
        if (spread < best_spread ||
            (spread == best_spread && clusters[i][0] < clusters[best][0])) {
            best = static_cast<int>(i);
            best_spread = spread;
        }
    }

    auto centroid_of = [&](const std::vector<int>& idx) {
        Point3D c = Point3D::Zero();
        for (int i : idx) c += points[i];
        return (c / static_cast<double>(idx.size())).eval();
    };

    FusedPoint out;
    out.inliers = clusters[best];
    out.point = centroid_of(out.inliers);

    // Enforce the kappa constraint once: drop members beyond kappa of the
    // centroid and recompute.
    std::vector<int> kept;
    for (int i : out.inliers) {
        if ((points[i] - out.point).norm() <= kappa) kept.push_back(i);
    }
    if (!kept.empty() && kept.size() != out.inliers.size()) {
        out.inliers = std::move(kept);
        out.point = centroid_of(out.inliers);
    }
    return out;
}

namespace {

int keypoint_count(const std::vector<Tracklet2D>& cluster) {
    for (const auto& t : cluster) {
        for (const auto& [f, o] : t.obs) {
            if (o.has_keypoints()) return static_cast<int>(o.keypoints.size());
        }
    }
    return 0;
}

Point3D valid_centroid(const Pose3D& pose) {
    Point3D c = Point3D::Zero();
    int n = 0;
    for (std::size_t j = 0; j < pose.joints.size(); ++j) {
        if (!pose.valid[j]) continue;
        c += pose.joints[j];
        ++n;
    }
    return n > 0 ? (c / n).eval() : c;
}

}  // namespace

Tracklet3D cmmt(const std::vector<Tracklet2D>& cluster, const Window& window,
                const CameraRig& rig, const CmmtParams& params, bool pose_mode,
                CmmtDiagnostics* diagnostics) {
    std::vector<InterpolatedTracklet> merged;
    merged.reserve(cluster.size());
    for (const auto& t : cluster) {
        merged.push_back(interpolate_tracklet(t, params.phi, window.start, window.end));
    }
    const int joints = pose_mode ? keypoint_count(cluster) : 0;

    Tracklet3D out;
    out.keyframe = window.keyframe;
    for (int t = window.start; t < window.end; ++t) {
        bool any_observed = false;
        const std::vector<EntryPoint> box_entries =
            collect_entries(merged, t, -1, &any_observed);
        if (distinct_cameras(box_entries) < 2) {
            if (diagnostics && !box_entries.empty()) diagnostics->empty_frames += 1;
            continue;
        }

        if (pose_mode && joints > 0) {
            Pose3D pose;
            pose.joints.assign(joints, Point3D::Zero());
            pose.valid.assign(joints, 0);
            int total_candidates = 0;
            for (int j = 0; j < joints; ++j) {
                const auto entries = collect_entries(merged, t, j, nullptr);
                if (distinct_cameras(entries) < 2) continue;
                const auto cands = triangulate_all_pairs(entries, rig);
                if (cands.empty()) continue;
                total_candidates += static_cast<int>(cands.size());
                std::vector<Point3D> pts;
                pts.reserve(cands.size());
                for (const auto& c : cands) pts.push_back(c.point);
                pose.joints[j] =
                    fuse_largest(complete_linkage_3d(pts, params.kappa), pts, params.kappa)
                        .point;
                pose.valid[j] = 1;
            }
            if (pose.num_valid() == 0) continue;
            out.points.emplace(t, valid_centroid(pose));
            out.poses.emplace(t, std::move(pose));
            out.synthetic_only.emplace(t, any_observed ? 0 : 1);
            if (diagnostics) diagnostics->candidates.emplace_back(t, total_candidates);
        } else {
            const std::vector<Candidate> cands = triangulate_all_pairs(box_entries, rig);
            if (cands.empty()) continue;
            std::vector<Point3D> pts;
            pts.reserve(cands.size());
            for (const auto& c : cands) pts.push_back(c.point);
            const FusedPoint fused =
                fuse_largest(complete_linkage_3d(pts, params.kappa), pts, params.kappa);
            out.points.emplace(t, fused.point);
            out.synthetic_only.emplace(t, any_observed ? 0 : 1);
            if (diagnostics) {
                diagnostics->candidates.emplace_back(t, static_cast<int>(cands.size()));
            }
        }
    }
    if (out.points.empty()) {
        throw EmptyTrackletError("cluster yielded no 3D position in window at keyframe " +
                                 std::to_string(window.keyframe));
    }
    return out;
}

namespace {

// Shared frame loop for the two single-frame ablation baselines.
template <typename EstimateFn>
Tracklet3D baseline_tracklet(const std::vector<Tracklet2D>& cluster, const Window& window,
                             bool pose_mode, EstimateFn estimate) {
    std::vector<InterpolatedTracklet> observed;
    observed.reserve(cluster.size());
    for (const auto& t : cluster) {
        InterpolatedTracklet it;
        it.base = t;  // no infill: single-frame methods
        observed.push_back(std::move(it));
    }
    const int joints = pose_mode ? keypoint_count(cluster) : 0;

    Tracklet3D out;
    out.keyframe = window.keyframe;
    for (int t = window.start; t < window.end; ++t) {
        if (pose_mode && joints > 0) {
            Pose3D pose;
            pose.joints.assign(joints, Point3D::Zero());
            pose.valid.assign(joints, 0);
            for (int j = 0; j < joints; ++j) {
                const auto entries = collect_entries(observed, t, j, nullptr);
                if (const auto X = estimate(entries)) {
                    pose.joints[j] = *X;
                    pose.valid[j] = 1;
                }
            }
            if (pose.num_valid() == 0) continue;
            out.points.emplace(t, valid_centroid(pose));
            out.poses.emplace(t, std::move(pose));
        } else {
            const auto entries = collect_entries(observed, t, -1, nullptr);
            if (const auto X = estimate(entries)) {
                out.points.emplace(t, *X);
            }
        }
    }
    if (out.points.empty()) {
        throw EmptyTrackletError("cluster yielded no 3D position in window at keyframe " +
                                 std::to_string(window.keyframe));
    }
    return out;
}

}  // namespace

Tracklet3D plain_triangulation(const std::vector<Tracklet2D>& cluster,
                               const Window& window, const CameraRig& rig,
                               bool pose_mode) {
    auto estimate = [&rig](const std::vector<EntryPoint>& entries) -> std::optional<Point3D> {
        if (distinct_cameras(entries) < 2) return std::nullopt;
        const auto cands = triangulate_all_pairs(entries, rig);
        if (cands.empty()) return std::nullopt;
        Point3D mean = Point3D::Zero();
        for (const auto& c : cands) mean += c.point;
        return (mean / static_cast<double>(cands.size())).eval();
    };
    return baseline_tracklet(cluster, window, pose_mode, estimate);
}

Tracklet3D ransac_triangulation(const std::vector<Tracklet2D>& cluster,
                                const Window& window, const CameraRig& rig,
                                const RansacParams& params, bool pose_mode) {
    Rng rng(params.seed);
    auto estimate = [&](const std::vector<EntryPoint>& entries) -> std::optional<Point3D> {
        if (distinct_cameras(entries) < 2) return std::nullopt;
        std::vector<std::pair<int, int>> pairs;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            for (std::size_t j = i + 1; j < entries.size(); ++j) {
                if (entries[i].camera != entries[j].camera) {
                    pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
                }
            }
        }
        if (pairs.empty()) return std::nullopt;

        std::optional<Point3D> best;
        int best_inliers = -1;
        for (int it = 0; it < params.iterations; ++it) {
            const auto& [i, j] = pairs[rng.uniform_int(pairs.size())];
            Point3D X;
            try {
                X = triangulate_pair(entries[i].point, entries[j].point,
                                     rig.camera(entries[i].camera),
                                     rig.camera(entries[j].camera))
                        .point;
            } catch (const Error&) {
                continue;
            }
            int inliers = 0;
            for (const auto& e : entries) {
                const Projection p = project(rig.camera(e.camera), X);
                if (p.behind_camera) continue;
                if ((p.pixel - e.point).norm() <= params.threshold_factor * e.scale) {
                    ++inliers;
                }
            }
            if (inliers > best_inliers) {
                best_inliers = inliers;
                best = X;
            }
        }
        return best;
    };
    return baseline_tracklet(cluster, window, pose_mode, estimate);
}

}  // namespace mvtrack
