#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvtrack/geometry.hpp"
#include "mvtrack/metrics.hpp"
#include "mvtrack/types.hpp"

namespace mvtrack {

struct SceneConfig {
    int n_persons = 5;
    int n_cameras = 4;
    int duration = 600;          // frames
    double arena_half_x = 4.0;   // meters
    double arena_half_y = 4.0;
    double walk_speed = 1.2;     // m/s
    double turn_rate = 0.15;     // max heading change, rad/frame
    double fps = 25.0;
    double ring_radius = 8.0;
    double ring_arc = 0.0;  // radians spanned by the cameras; 0 = full circle
    double camera_height = 3.5;
    double focal_px = 850.0;
    int image_width = 1920;
    int image_height = 1080;
    bool with_poses = false;     // articulated 15-joint skeletons
    std::uint64_t seed = 1;
};

struct NoiseConfig {
    double pixel_sigma = 0.0;        // px, gaussian on projected points
    double miss_rate = 0.0;          // per person-camera-frame
    double fp_rate = 0.0;            // per camera-frame
    double id_swap_rate = 0.0;       // per tracklet
    double bbox_scale_jitter = 0.0;  // relative sigma on w and h
    double occlusion_iou = 0.0;      // drop the farther box above this IoU; 0 = off
    std::uint64_t seed = 2;
};

struct Scene {
    std::vector<CameraModel> cameras;
    TrajectorySet ground_truth;        // footprint points; poses when enabled
    std::vector<double> person_scale;  // body scale per person id
};

struct IdSwapEvent {
    int camera = 0;
    int person_a = 0;
    int person_b = 0;
    int frame = 0;  // labels exchange from this frame on
};

struct RenderResult {
    // detections[camera][frame] -> observations (persons then false positives)
    std::vector<std::vector<std::vector<Observation2D>>> detections;
    // labeled[camera] -> noisy per-person tracklets (local_id = person id),
    // with any id-swap events already applied
    std::vector<std::vector<Tracklet2D>> labeled;
    std::vector<IdSwapEvent> swaps;
};

// Waypoint walkers inside the arena (footprints at z = 0, skeletons above
// ground when enabled) observed by a camera ring looking at the arena
// center. Fully deterministic under the seed.
Scene generate_scene(const SceneConfig& cfg);

// Projects every person into every camera and applies the noise model:
// gaussian pixel noise, Bernoulli misses, uniform false positives, box
// jitter, an optional occlusion rule and optional local-id swaps.
RenderResult render_detections(const Scene& scene, const SceneConfig& cfg,
                               const NoiseConfig& noise);

// Exchanges the tails of two same-camera tracklets from the event frame on.
// `tracklets` is one camera's list; events for other cameras are ignored.
void inject_id_swaps(std::vector<Tracklet2D>& tracklets, int camera,
                     const std::vector<IdSwapEvent>& events);

struct Scenario {
    std::string name;
    SceneConfig scene;
    NoiseConfig noise;
    std::string expected;  // documented failure signature
};

// Named presets exercising the known failure modes: a zone covered by one
// camera, a near-coincident camera pair, and a crowded occlusion cluster,
// plus a well-conditioned reference.
std::vector<Scenario> degenerate_scenarios();

}  // namespace mvtrack
