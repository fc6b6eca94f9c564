#pragma once

// Shared simulator-backed fixtures for tests.

#include <vector>

#include "mvtrack/simulator.hpp"

namespace scenes {

using namespace mvtrack;

struct Fixture {
    Scene scene;
    RenderResult rendered;
    CameraRig rig;
    SceneConfig cfg;
};

inline Fixture make(SceneConfig cfg, NoiseConfig noise = {}) {
    Fixture f;
    f.cfg = cfg;
    f.scene = generate_scene(cfg);
    f.rendered = render_detections(f.scene, cfg, noise);
    f.rig = CameraRig(f.scene.cameras);
    return f;
}

inline std::vector<Tracklet2D> all_labeled(const RenderResult& r) {
    std::vector<Tracklet2D> out;
    for (const auto& cam : r.labeled) {
        out.insert(out.end(), cam.begin(), cam.end());
    }
    return out;
}

}  // namespace scenes
