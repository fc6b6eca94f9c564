#include "mvtrack/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mvtrack/association.hpp"
#include "mvtrack/errors.hpp"
#include "mvtrack/rng.hpp"
#include "mvtrack/tracker2d.hpp"
#include "mvtrack/windows.hpp"

namespace mvtrack {

namespace {

Tracklet3D triangulate_cluster(const std::vector<Tracklet2D>& members, const Window& win,
                               const CameraRig& rig, const PipelineConfig& cfg,
                               CmmtDiagnostics* diag) {
    if (cfg.cmmt_method == "ransac") {
        return ransac_triangulation(members, win, rig, RansacParams{}, cfg.pose_mode());
    }
    if (cfg.cmmt_method == "plain") {
        return plain_triangulation(members, win, rig, cfg.pose_mode());
    }
    return cmmt(members, win, rig, cfg.cmmt, cfg.pose_mode(), diag);
}

PipelineResult run_windows(const std::vector<Tracklet2D>& all_tracklets, int num_frames,
                           const CameraRig& rig, const PipelineConfig& cfg) {
    validate(cfg);
    PipelineResult result;
    if (num_frames < 1) return result;

    TrackLinker linker(cfg.linker_params());
    for (int k : keyframes(num_frames, cfg.window.nu, cfg.window.delta)) {
        const Window win = crop(all_tracklets, k, cfg.window.nu);

        // Association consumes confirmed tracklets only; tentative ones ride
        // along in the window for diagnostics.
        std::vector<Tracklet2D> confirmed;
        confirmed.reserve(win.tracklets.size());
        for (const auto& t : win.tracklets) {
            if (t.confirmed) confirmed.push_back(t);
        }

        const auto distances = distance_matrix(confirmed, rig, cfg.pose_mode());
        const ClusterSet clusters = pdnc(distances, cfg.assoc_lambda);
        if (cfg.debug) {
            std::ostringstream msg;
            msg << "window k=" << k << ": " << confirmed.size() << " tracklets, "
                << clusters.clusters.size() << " clusters";
            for (const auto& m : clusters.audit) {
                msg << "; merge (" << m.cluster_a << "," << m.cluster_b << ") d="
                    << m.distance;
            }
            result.diagnostics.messages.push_back(msg.str());
        }

        std::vector<Tracklet3D> window_tracks;
        int cluster_id = 0;
        for (const auto& cluster : clusters.clusters) {
            std::vector<Tracklet2D> members;
            members.reserve(cluster.size());
            for (int idx : cluster) members.push_back(confirmed[idx]);
            CmmtDiagnostics diag;
            try {
                Tracklet3D track = triangulate_cluster(members, win, rig, cfg, &diag);
                track.cluster_id = cluster_id;
                window_tracks.push_back(std::move(track));
            } catch (const EmptyTrackletError&) {
                result.diagnostics.dropped_clusters += 1;
            }
            result.diagnostics.empty_frames += diag.empty_frames;
            if (cfg.debug && !diag.candidates.empty()) {
                std::ostringstream msg;
                msg << "window k=" << k << " cluster " << cluster_id << " candidates:";
                for (const auto& [frame, count] : diag.candidates) {
                    msg << ' ' << frame << ':' << count;
                }
                result.diagnostics.messages.push_back(msg.str());
            }
            ++cluster_id;
        }
        linker.link(k, window_tracks);
    }

    for (const LongTrack& track : linker.finish()) {
        result.trajectories.points[track.global_id] = track.points;
        if (!track.poses.empty()) {
            result.trajectories.poses[track.global_id] = track.poses;
        }
    }
    return result;
}

}  // namespace

PipelineResult run_pipeline(const DetectionStreams& detections, const CameraRig& rig,
                            const PipelineConfig& cfg) {
    std::vector<Tracklet2D> all_tracklets;
    for (const auto& cam : rig.cameras()) {
        auto it = detections.by_camera.find(cam.camera_id);
        if (it == detections.by_camera.end()) continue;
        for (auto& t : track_camera_stream(cam.camera_id, it->second, cfg.svtrack)) {
            all_tracklets.push_back(std::move(t));
        }
    }
    return run_windows(all_tracklets, detections.num_frames, rig, cfg);
}

PipelineResult run_pipeline_from_tracklets(
    const std::vector<std::vector<Tracklet2D>>& tracklets_per_camera, int num_frames,
    const CameraRig& rig, const PipelineConfig& cfg) {
    std::vector<Tracklet2D> all_tracklets;
    for (const auto& camera_tracklets : tracklets_per_camera) {
        for (const auto& t : camera_tracklets) {
            if (!t.obs.empty()) all_tracklets.push_back(t);
        }
    }
    return run_windows(all_tracklets, num_frames, rig, cfg);
}

std::vector<BenchCell> benchmark(const std::vector<int>& camera_counts,
                                 const std::vector<int>& person_counts, int frames,
                                 const PipelineConfig& cfg, int repeats) {
    std::vector<BenchCell> cells;
    for (int nc : camera_counts) {
        for (int np : person_counts) {
            SceneConfig scene_cfg;
            scene_cfg.n_cameras = nc;
            scene_cfg.n_persons = np;
            scene_cfg.duration = frames;
            scene_cfg.seed = 42;
            const Scene scene = generate_scene(scene_cfg);
            const RenderResult rendered =
                render_detections(scene, scene_cfg, NoiseConfig{});
            const CameraRig rig(scene.cameras);
            DetectionStreams streams;
            streams.num_frames = frames;
            for (int c = 0; c < nc; ++c) {
                streams.by_camera[c] = rendered.detections[c];
            }

            double best = 0.0;
            for (int r = 0; r < std::max(1, repeats); ++r) {
                const auto t0 = std::chrono::steady_clock::now();
                const PipelineResult run = run_pipeline(streams, rig, cfg);
                const auto t1 = std::chrono::steady_clock::now();
                (void)run;
                const double s = std::chrono::duration<double>(t1 - t0).count();
                if (r == 0 || s < best) best = s;
            }
            BenchCell cell;
            cell.cameras = nc;
            cell.persons = np;
            cell.frames = frames;
            cell.seconds = best;
            cell.fps = best > 0.0 ? frames / best : 0.0;
            cells.push_back(cell);
        }
    }
    return cells;
}

std::string bench_table_text(const std::vector<BenchCell>& cells) {
    std::ostringstream out;
    out << "cameras persons frames seconds fps\n";
    for (const auto& c : cells) {
        out << c.cameras << ' ' << c.persons << ' ' << c.frames << ' ' << c.seconds
            << ' ' << c.fps << '\n';
    }
    return out.str();
}

std::string bench_table_json(const std::vector<BenchCell>& cells) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : cells) {
        rows.push_back({{"cameras", c.cameras},
                        {"persons", c.persons},
                        {"frames", c.frames},
                        {"seconds", c.seconds},
                        {"fps", c.fps}});
    }
    return rows.dump(2);
}

AblationResult ablate_triangulation(int n_cameras, int frames, double pair_fraction,
                                    double pixel_sigma, std::uint64_t seed) {
    SceneConfig scene_cfg;
    scene_cfg.n_persons = 1;
    scene_cfg.n_cameras = n_cameras;
    scene_cfg.duration = frames;
    scene_cfg.seed = seed;
    NoiseConfig noise;
    noise.pixel_sigma = pixel_sigma;
    noise.seed = seed + 1;
    const Scene scene = generate_scene(scene_cfg);
    const RenderResult rendered = render_detections(scene, scene_cfg, noise);
    const CameraRig rig(scene.cameras);

    // A pair is corrupted when either endpoint is; displace each observation
    // with probability q solving 1 - (1-q)^2 = pair_fraction.
    const double q = 1.0 - std::sqrt(1.0 - pair_fraction);
    Rng rng(seed + 2);
    std::vector<Tracklet2D> cluster;
    std::map<int, std::set<int>> corrupted;  // frame -> cameras hit
    for (int c = 0; c < n_cameras; ++c) {
        Tracklet2D t = rendered.labeled[c][0];
        for (auto& [f, o] : t.obs) {
            if (rng.bernoulli(q)) {
                o.center += Point2D(rng.uniform(-150.0, 150.0),
                                    rng.uniform(60.0, 160.0));
                corrupted[f].insert(c);
            }
        }
        cluster.push_back(std::move(t));
    }

    long long bad_pairs = 0, all_pairs = 0;
    for (int f = 0; f < frames; ++f) {
        const int hit = corrupted.count(f)
                            ? static_cast<int>(corrupted.at(f).size())
                            : 0;
        all_pairs += n_cameras * (n_cameras - 1) / 2;
        bad_pairs += n_cameras * (n_cameras - 1) / 2 -
                     (n_cameras - hit) * (n_cameras - hit - 1) / 2;
    }

    Window win;
    win.keyframe = frames / 2;
    win.start = 0;
    win.end = frames;
    win.tracklets = cluster;

    auto median_error = [&](const Tracklet3D& track) {
        std::vector<double> errs;
        for (const auto& [f, p] : track.points) {
            errs.push_back((p - scene.ground_truth.points.at(0).at(f)).norm());
        }
        std::nth_element(errs.begin(), errs.begin() + errs.size() / 2, errs.end());
        return errs[errs.size() / 2];
    };

    AblationResult out;
    out.frames = frames;
    out.corrupted_pair_fraction =
        all_pairs > 0 ? static_cast<double>(bad_pairs) / all_pairs : 0.0;
    out.median_cmmt = median_error(cmmt(cluster, win, rig, CmmtParams{}, false));
    out.median_ransac =
        median_error(ransac_triangulation(cluster, win, rig, RansacParams{}, false));
    out.median_plain = median_error(plain_triangulation(cluster, win, rig, false));
    return out;
}

std::string ablation_text(const AblationResult& r) {
    std::ostringstream out;
    out << "frames = " << r.frames << '\n'
        << "corrupted_pair_fraction = " << r.corrupted_pair_fraction << '\n'
        << "median_error_cmmt = " << r.median_cmmt << '\n'
        << "median_error_ransac = " << r.median_ransac << '\n'
        << "median_error_plain = " << r.median_plain << '\n';
    return out.str();
}

std::string ablation_json(const AblationResult& r) {
    nlohmann::json j{{"frames", r.frames},
                     {"corrupted_pair_fraction", r.corrupted_pair_fraction},
                     {"median_error_cmmt", r.median_cmmt},
                     {"median_error_ransac", r.median_ransac},
                     {"median_error_plain", r.median_plain}};
    return j.dump(2);
}

}  // namespace mvtrack
