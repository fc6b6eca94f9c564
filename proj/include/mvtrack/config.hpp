#pragma once

#include <string>

#include "mvtrack/linker.hpp"
#include "mvtrack/tracker2d.hpp"
#include "mvtrack/triangulation.hpp"
#include "mvtrack/windows.hpp"

namespace mvtrack {

// All pipeline knobs. Defaults follow the published operating point
// (nu = 30, delta = 20, lambda = 0.3, phi = 7, kappa = 0.2); the "wide"
// preset switches the window to nu = 50, delta = 30.
struct PipelineConfig {
    WindowConfig window;
    double assoc_lambda = 0.3;
    std::string assoc_mode = "box";    // box | pose
    CmmtParams cmmt;
    std::string cmmt_method = "cmmt";  // cmmt | ransac | plain
    double linker_gate = -1.0;         // < 0: auto (0.5 m box, 0.3 m pose)
    int linker_max_window_misses = 1;
    TrackerParams svtrack;
    double metrics_dist = 0.5;
    std::string metrics_limbs_file;
    bool debug = false;

    bool pose_mode() const { return assoc_mode == "pose"; }
    double effective_linker_gate() const {
        if (linker_gate >= 0.0) return linker_gate;
        return pose_mode() ? 0.3 : 0.5;
    }
    LinkerParams linker_params() const {
        return {effective_linker_gate(), linker_max_window_misses};
    }
};

// Parse from a JSON file. Unknown keys are rejected; values are validated.
PipelineConfig load_config(const std::string& path);
PipelineConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const PipelineConfig& cfg);

// Named presets: "default" and "wide" (nu = 50, delta = 30).
PipelineConfig config_preset(const std::string& name);

// Apply a dotted-key override like "window.size=50".
void apply_override(PipelineConfig& cfg, const std::string& assignment);

// Throws ConfigError when a value is out of range.
void validate(const PipelineConfig& cfg);

}  // namespace mvtrack
