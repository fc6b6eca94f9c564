#include "mvtrack/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mvtrack/errors.hpp"

namespace mvtrack {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& scope,
                    const std::set<std::string>& known) {
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw ConfigError("unknown config key '" +
                              (scope.empty() ? key : scope + "." + key) + "'");
        }
    }
}

template <typename T>
void get(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

PipelineConfig from_json(const json& j) {
    PipelineConfig cfg;
    reject_unknown(j, "",
                   {"window", "assoc", "cmmt", "linker", "svtrack", "metrics", "debug"});
    if (j.contains("window")) {
        const auto& w = j.at("window");
        reject_unknown(w, "window", {"size", "step"});
        get(w, "size", cfg.window.nu);
        get(w, "step", cfg.window.delta);
    }
    if (j.contains("assoc")) {
        const auto& a = j.at("assoc");
        reject_unknown(a, "assoc", {"lambda", "mode"});
        get(a, "lambda", cfg.assoc_lambda);
        get(a, "mode", cfg.assoc_mode);
    }
    if (j.contains("cmmt")) {
        const auto& c = j.at("cmmt");
        reject_unknown(c, "cmmt", {"phi", "kappa", "method"});
        get(c, "phi", cfg.cmmt.phi);
        get(c, "kappa", cfg.cmmt.kappa);
        get(c, "method", cfg.cmmt_method);
    }
    if (j.contains("linker")) {
        const auto& l = j.at("linker");
        reject_unknown(l, "linker", {"gate", "max_window_misses"});
        get(l, "gate", cfg.linker_gate);
        get(l, "max_window_misses", cfg.linker_max_window_misses);
    }
    if (j.contains("svtrack")) {
        const auto& s = j.at("svtrack");
        reject_unknown(s, "svtrack", {"iou_min", "max_age", "min_hits", "smoothing"});
        get(s, "iou_min", cfg.svtrack.iou_min);
        get(s, "max_age", cfg.svtrack.max_age);
        get(s, "min_hits", cfg.svtrack.min_hits);
        get(s, "smoothing", cfg.svtrack.smoothing);
    }
    if (j.contains("metrics")) {
        const auto& m = j.at("metrics");
        reject_unknown(m, "metrics", {"dist", "limbs_file"});
        get(m, "dist", cfg.metrics_dist);
        get(m, "limbs_file", cfg.metrics_limbs_file);
    }
    get(j, "debug", cfg.debug);
    validate(cfg);
    return cfg;
}

json to_json(const PipelineConfig& cfg) {
    json linker = {{"max_window_misses", cfg.linker_max_window_misses}};
    if (cfg.linker_gate >= 0.0) linker["gate"] = cfg.linker_gate;  // else: auto
    return json{{"window", {{"size", cfg.window.nu}, {"step", cfg.window.delta}}},
                {"assoc", {{"lambda", cfg.assoc_lambda}, {"mode", cfg.assoc_mode}}},
                {"cmmt",
                 {{"phi", cfg.cmmt.phi},
                  {"kappa", cfg.cmmt.kappa},
                  {"method", cfg.cmmt_method}}},
                {"linker", linker},
                {"svtrack",
                 {{"iou_min", cfg.svtrack.iou_min},
                  {"max_age", cfg.svtrack.max_age},
                  {"min_hits", cfg.svtrack.min_hits},
                  {"smoothing", cfg.svtrack.smoothing}}},
                {"metrics",
                 {{"dist", cfg.metrics_dist}, {"limbs_file", cfg.metrics_limbs_file}}},
                {"debug", cfg.debug}};
}

}  // namespace

void validate(const PipelineConfig& cfg) {
    if (cfg.window.nu < 1) throw ConfigError("window.size must be >= 1");
    if (cfg.window.delta < 1 || cfg.window.delta >= cfg.window.nu) {
        throw ConfigError("window.step must satisfy 1 <= step < size");
    }
    if (!(cfg.assoc_lambda > 0.0)) throw ConfigError("assoc.lambda must be positive");
    if (cfg.assoc_mode != "box" && cfg.assoc_mode != "pose") {
        throw ConfigError("assoc.mode must be 'box' or 'pose'");
    }
    if (cfg.cmmt.phi < 1) throw ConfigError("cmmt.phi must be >= 1");
    if (!(cfg.cmmt.kappa > 0.0)) throw ConfigError("cmmt.kappa must be positive");
    if (cfg.cmmt_method != "cmmt" && cfg.cmmt_method != "ransac" &&
        cfg.cmmt_method != "plain") {
        throw ConfigError("cmmt.method must be 'cmmt', 'ransac' or 'plain'");
    }
    if (cfg.linker_gate >= 0.0 && !(cfg.linker_gate > 0.0)) {
        throw ConfigError("linker.gate must be positive when set");
    }
    if (cfg.linker_max_window_misses < 1) {
        throw ConfigError("linker.max_window_misses must be >= 1");
    }
    if (!(cfg.svtrack.iou_min > 0.0 && cfg.svtrack.iou_min <= 1.0)) {
        throw ConfigError("svtrack.iou_min must be in (0, 1]");
    }
    if (cfg.svtrack.max_age < 0) throw ConfigError("svtrack.max_age must be >= 0");
    if (cfg.svtrack.min_hits < 1) throw ConfigError("svtrack.min_hits must be >= 1");
    if (!(cfg.metrics_dist > 0.0)) throw ConfigError("metrics.dist must be positive");
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path + " for reading");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return config_from_json_text(buffer.str());
}

PipelineConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config JSON: ") + e.what());
    }
    try {
        return from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config value: ") + e.what());
    }
}

std::string config_to_json_text(const PipelineConfig& cfg) { return to_json(cfg).dump(2); }

PipelineConfig config_preset(const std::string& name) {
    PipelineConfig cfg;
    if (name == "default" || name.empty()) return cfg;
    if (name == "wide") {
        cfg.window.nu = 50;
        cfg.window.delta = 30;
        return cfg;
    }
    throw ConfigError("unknown preset '" + name + "' (expected 'default' or 'wide')");
}

void apply_override(PipelineConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override must look like key=value: '" + assignment + "'");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    // Route through the JSON loader so typing and validation stay in one
    // place. String-valued keys get quoted.
    json j = json::parse(config_to_json_text(cfg));
    const bool is_string = key == "assoc.mode" || key == "cmmt.method" ||
                           key == "metrics.limbs_file";
    json parsed;
    if (is_string) {
        parsed = value;
    } else {
        try {
            parsed = json::parse(value);
        } catch (const json::exception&) {
            throw ConfigError("cannot parse value for '" + key + "': " + value);
        }
    }
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
        j[key] = parsed;
    } else {
        j[key.substr(0, dot)][key.substr(dot + 1)] = parsed;
    }
    cfg = config_from_json_text(j.dump());
}

}  // namespace mvtrack
