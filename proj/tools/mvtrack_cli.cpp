#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "mvtrack/config.hpp"
#include "mvtrack/errors.hpp"
#include "mvtrack/io.hpp"
#include "mvtrack/pipeline.hpp"
#include "mvtrack/simulator.hpp"
#include "mvtrack/version.hpp"

namespace {

using namespace mvtrack;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << text;
}

PipelineConfig build_config(const std::string& config_path, const std::string& preset,
                            const std::vector<std::string>& overrides, bool debug) {
    PipelineConfig cfg =
        config_path.empty() ? config_preset(preset) : load_config(config_path);
    if (!config_path.empty() && !preset.empty() && preset != "default") {
        throw ConfigError("--config and --preset are mutually exclusive");
    }
    for (const auto& assignment : overrides) apply_override(cfg, assignment);
    cfg.debug = cfg.debug || debug;
    validate(cfg);
    return cfg;
}

int cmd_track(const std::string& calib_path, const std::string& det_path,
              const std::string& out_path, const std::string& gt_path,
              const std::string& config_path, const std::string& preset,
              const std::vector<std::string>& overrides, bool debug,
              const std::string& metrics_out) {
    const PipelineConfig cfg = build_config(config_path, preset, overrides, debug);
    const CameraRig rig(load_calibration(calib_path));
    const DetectionStreams streams = load_detections(det_path);

    const PipelineResult result = run_pipeline(streams, rig, cfg);
    write_tracks(out_path, result.trajectories);
    if (cfg.debug) {
        for (const auto& msg : result.diagnostics.messages) std::cerr << msg << '\n';
        std::cerr << "empty_frames = " << result.diagnostics.empty_frames << '\n'
                  << "dropped_clusters = " << result.diagnostics.dropped_clusters
                  << '\n';
    }

    if (!gt_path.empty()) {
        const TrajectorySet gt = load_tracks(gt_path);
        const MotReport report =
            evaluate_tracking(gt, result.trajectories, cfg.metrics_dist);
        std::cout << report_text(report);
        if (cfg.pose_mode() && !gt.poses.empty()) {
            const auto limbs = cfg.metrics_limbs_file.empty()
                                   ? default_limbs()
                                   : load_limbs(cfg.metrics_limbs_file);
            std::cout << "pcp = " << pcp(gt, result.trajectories, limbs).average
                      << '\n';
        }
        if (!metrics_out.empty()) write_text(metrics_out, report_json(report));
    }
    return 0;
}

int cmd_simulate(const std::string& out_dir, int persons, int cameras, int frames,
                 std::uint64_t seed, const std::string& mode, double pixel_sigma,
                 double miss_rate, double fp_rate, double id_swap_rate,
                 double bbox_jitter, double occlusion_iou, const std::string& scenario) {
    SceneConfig scene_cfg;
    NoiseConfig noise;
    if (!scenario.empty()) {
        bool found = false;
        for (const auto& s : degenerate_scenarios()) {
            if (s.name == scenario) {
                scene_cfg = s.scene;
                noise = s.noise;
                found = true;
                std::cerr << "scenario " << s.name << ": " << s.expected << '\n';
                break;
            }
        }
        if (!found) throw Error("unknown scenario '" + scenario + "'");
    }
    if (persons > 0) scene_cfg.n_persons = persons;
    if (cameras > 0) scene_cfg.n_cameras = cameras;
    if (frames > 0) scene_cfg.duration = frames;
    scene_cfg.seed = seed;
    scene_cfg.with_poses = mode == "pose";
    noise.seed = seed + 1;
    if (pixel_sigma >= 0) noise.pixel_sigma = pixel_sigma;
    if (miss_rate >= 0) noise.miss_rate = miss_rate;
    if (fp_rate >= 0) noise.fp_rate = fp_rate;
    if (id_swap_rate >= 0) noise.id_swap_rate = id_swap_rate;
    if (bbox_jitter >= 0) noise.bbox_scale_jitter = bbox_jitter;
    if (occlusion_iou >= 0) noise.occlusion_iou = occlusion_iou;

    const Scene scene = generate_scene(scene_cfg);
    const RenderResult rendered = render_detections(scene, scene_cfg, noise);

    std::filesystem::create_directories(out_dir);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    write_calibration(path("calibration.txt"), scene.cameras);
    DetectionStreams streams;
    streams.num_frames = scene_cfg.duration;
    for (int c = 0; c < scene_cfg.n_cameras; ++c) {
        streams.by_camera[c] = rendered.detections[c];
    }
    write_detections(path("detections.txt"), streams);
    write_tracks(path("gt_tracks.txt"), scene.ground_truth);

    std::cout << "wrote " << path("calibration.txt") << ", " << path("detections.txt")
              << ", " << path("gt_tracks.txt") << '\n'
              << "persons = " << scene_cfg.n_persons
              << ", cameras = " << scene_cfg.n_cameras
              << ", frames = " << scene_cfg.duration << '\n';
    if (!rendered.swaps.empty()) {
        std::cout << "injected id swaps = " << rendered.swaps.size() << '\n';
    }
    return 0;
}

int cmd_evaluate(const std::string& gt_path, const std::string& pred_path, double dist,
                 const std::string& limbs_path, const std::string& json_path) {
    const TrajectorySet gt = load_tracks(gt_path);
    const TrajectorySet pred = load_tracks(pred_path);
    const MotReport report = evaluate_tracking(gt, pred, dist);
    std::cout << report_text(report);
    if (!gt.poses.empty() && !pred.poses.empty()) {
        const auto limbs = limbs_path.empty() ? default_limbs() : load_limbs(limbs_path);
        std::cout << "pcp = " << pcp(gt, pred, limbs).average << '\n';
    }
    if (!json_path.empty()) write_text(json_path, report_json(report));
    return 0;
}

int cmd_ablate(int cameras, int frames, double pair_fraction, double pixel_sigma,
               std::uint64_t seed, const std::string& json_path) {
    const AblationResult r =
        ablate_triangulation(cameras, frames, pair_fraction, pixel_sigma, seed);
    std::cout << ablation_text(r);
    if (!json_path.empty()) write_text(json_path, ablation_json(r));
    const bool ordered = r.median_cmmt <= r.median_ransac &&
                         r.median_ransac <= r.median_plain;
    std::cout << "ordering_ok = " << (ordered ? "true" : "false") << '\n';
    return ordered ? 0 : 1;
}

int cmd_bench(const std::vector<int>& cameras, const std::vector<int>& persons,
              int frames, int repeats, const std::string& json_path) {
    PipelineConfig cfg;
    const auto cells = benchmark(cameras, persons, frames, cfg, repeats);
    std::cout << bench_table_text(cells);
    if (!json_path.empty()) write_text(json_path, bench_table_json(cells));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Multi-view multi-person 3D tracker: cross-view tracklet association and "
        "robust triangulation over sliding windows.\n"
        "Near-online: results for a window are final once the next window is "
        "linked, about one window size (window.size frames) behind the input."};
    app.set_version_flag("--version", mvtrack::kVersion);
    app.require_subcommand(1);

    // track
    std::string calib_path, det_path, out_path, gt_path, config_path, metrics_out;
    std::string preset = "default";
    std::vector<std::string> overrides;
    bool debug = false;
    auto* track = app.add_subcommand(
        "track", "Run the tracking pipeline on detection and calibration files");
    track->add_option("--calib", calib_path, "calibration file")->required();
    track->add_option("--detections", det_path, "detection file")->required();
    track->add_option("--output", out_path, "output track file")->required();
    track->add_option("--gt", gt_path, "ground-truth tracks; prints metrics");
    track->add_option("--config", config_path, "pipeline config (JSON)");
    track->add_option("--preset", preset, "named preset: default | wide");
    track->add_option("--set", overrides, "override, e.g. --set window.size=50");
    track->add_option("--metrics-out", metrics_out, "write the metric report (JSON)");
    track->add_flag("--debug", debug, "emit association audit and diagnostics");

    // simulate
    std::string out_dir, mode = "box", scenario;
    int persons = 0, cameras = 0, frames = 0;
    std::uint64_t seed = 1;
    double pixel_sigma = -1, miss_rate = -1, fp_rate = -1, id_swap_rate = -1;
    double bbox_jitter = -1, occlusion_iou = -1;
    auto* simulate = app.add_subcommand(
        "simulate", "Generate a synthetic scene: calibration, detections and ground "
                    "truth");
    simulate->add_option("--out-dir", out_dir, "output directory")->required();
    simulate->add_option("--persons", persons, "number of persons (default 5)");
    simulate->add_option("--cameras", cameras, "number of cameras (default 4)");
    simulate->add_option("--frames", frames, "number of frames (default 600)");
    simulate->add_option("--seed", seed, "random seed");
    simulate->add_option("--mode", mode, "box | pose detections");
    simulate->add_option("--pixel-sigma", pixel_sigma, "gaussian pixel noise");
    simulate->add_option("--miss-rate", miss_rate, "per-observation miss rate");
    simulate->add_option("--fp-rate", fp_rate, "false positives per camera-frame");
    simulate->add_option("--id-swap-rate", id_swap_rate, "per-tracklet swap rate");
    simulate->add_option("--bbox-jitter", bbox_jitter, "relative box size jitter");
    simulate->add_option("--occlusion-iou", occlusion_iou,
                         "drop the farther box above this IoU");
    simulate->add_option("--scenario", scenario,
                         "preset: well_conditioned | single_camera_zone | "
                         "near_coincident_pair | crowded_occlusion");

    // evaluate
    std::string eval_gt, eval_pred, limbs_path, eval_json;
    double dist = 0.5;
    auto* evaluate =
        app.add_subcommand("evaluate", "Score predicted tracks against ground truth");
    evaluate->add_option("--gt", eval_gt, "ground-truth track file")->required();
    evaluate->add_option("--pred", eval_pred, "predicted track file")->required();
    evaluate->add_option("--dist", dist, "matching distance in meters");
    evaluate->add_option("--limbs", limbs_path, "limb table (JSON pairs)");
    evaluate->add_option("--json", eval_json, "write the report as JSON");

    // ablate
    int ab_cameras = 5, ab_frames = 500;
    double ab_fraction = 0.4, ab_sigma = 2.0;
    std::uint64_t ab_seed = 21;
    std::string ab_json;
    auto* ablate = app.add_subcommand(
        "ablate", "Compare triangulation methods on corrupted stereo pairs");
    ablate->add_option("--cameras", ab_cameras, "cameras in the cluster");
    ablate->add_option("--frames", ab_frames, "frames to triangulate");
    ablate->add_option("--pair-fraction", ab_fraction, "target corrupted-pair share");
    ablate->add_option("--pixel-sigma", ab_sigma, "gaussian pixel noise");
    ablate->add_option("--seed", ab_seed, "random seed");
    ablate->add_option("--json", ab_json, "write results as JSON");

    // bench
    std::vector<int> bench_cameras{2, 4, 6}, bench_persons{2, 4, 8};
    int bench_frames = 600, repeats = 3;
    std::string bench_json;
    auto* bench = app.add_subcommand(
        "bench", "Throughput of the tracking stages over a camera x person grid");
    bench->add_option("--cameras", bench_cameras, "camera counts")->delimiter(',');
    bench->add_option("--persons", bench_persons, "person counts")->delimiter(',');
    bench->add_option("--frames", bench_frames, "frames per cell");
    bench->add_option("--repeats", repeats, "repeats per cell (best kept)");
    bench->add_option("--json", bench_json, "write the table as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (track->parsed()) {
            return cmd_track(calib_path, det_path, out_path, gt_path, config_path,
                             preset, overrides, debug, metrics_out);
        }
        if (simulate->parsed()) {
            return cmd_simulate(out_dir, persons, cameras, frames, seed, mode,
                                pixel_sigma, miss_rate, fp_rate, id_swap_rate,
                                bbox_jitter, occlusion_iou, scenario);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(eval_gt, eval_pred, dist, limbs_path, eval_json);
        }
        if (ablate->parsed()) {
            return cmd_ablate(ab_cameras, ab_frames, ab_fraction, ab_sigma, ab_seed,
                              ab_json);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_cameras, bench_persons, bench_frames, repeats,
                             bench_json);
        }
    } catch (const mvtrack::ParseError& e) {
        std::cerr << "error: parse: " << e.what() << '\n';
        return 1;
    } catch (const mvtrack::ConfigError& e) {
        std::cerr << "error: config: " << e.what() << '\n';
        return 2;
    } catch (const mvtrack::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
