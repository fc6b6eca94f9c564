#pragma once

#include <string>
#include <vector>

#include "mvtrack/config.hpp"
#include "mvtrack/io.hpp"
#include "mvtrack/linker.hpp"
#include "mvtrack/metrics.hpp"
#include "mvtrack/simulator.hpp"

namespace mvtrack {

struct PipelineDiagnostics {
    int empty_frames = 0;      // frames a cluster lacked a stereo pair
    int dropped_clusters = 0;  // clusters with no 3D position at all
    std::vector<std::string> messages;  // populated when cfg.debug is set
};

struct PipelineResult {
    TrajectorySet trajectories;
    PipelineDiagnostics diagnostics;
};

// Full near-online run: per-camera 2D tracking, sliding windows, cross-view
// association, triangulation and window linking. Results for window k are
// final once window k+1 has been linked; the end-to-end latency is therefore
// about one window size.
//
// Windows are independent until linking, so `threads` > 1 computes their
// association/triangulation stages concurrently while the linker still
// consumes them in keyframe order; the output is identical to a sequential
// run.
PipelineResult run_pipeline(const DetectionStreams& detections, const CameraRig& rig,
                            const PipelineConfig& cfg, int threads = 1);

// Same pipeline but starting from externally provided per-camera 2D
// tracklets (the single-view tracking stage is skipped).
PipelineResult run_pipeline_from_tracklets(
    const std::vector<std::vector<Tracklet2D>>& tracklets_per_camera, int num_frames,
    const CameraRig& rig, const PipelineConfig& cfg, int threads = 1);

struct BenchCell {
    int cameras = 0;
    int persons = 0;
    int frames = 0;
    double seconds = 0.0;  // best wall-clock over repeats, tracking stages only
    double fps = 0.0;
};

// Wall-clock throughput of the tracking stages (detection excluded: streams
// are pre-rendered) over a grid of camera and person counts.
std::vector<BenchCell> benchmark(const std::vector<int>& camera_counts,
                                 const std::vector<int>& person_counts, int frames,
                                 const PipelineConfig& cfg, int repeats = 3);

std::string bench_table_text(const std::vector<BenchCell>& cells);
std::string bench_table_json(const std::vector<BenchCell>& cells);

struct AblationResult {
    double median_cmmt = 0.0;    // median 3D error (meters)
    double median_ransac = 0.0;
    double median_plain = 0.0;
    double corrupted_pair_fraction = 0.0;  // measured share of bad stereo pairs
    int frames = 0;
};

// Triangulation-method comparison on one simulated cluster whose per-camera
// observations are corrupted so that roughly `pair_fraction` of stereo pairs
// touch a displaced endpoint. All three methods see identical inputs.
AblationResult ablate_triangulation(int n_cameras, int frames, double pair_fraction,
                                    double pixel_sigma, std::uint64_t seed);

std::string ablation_text(const AblationResult& r);
std::string ablation_json(const AblationResult& r);

}  // namespace mvtrack
