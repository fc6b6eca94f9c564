#include "mvtrack/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mvtrack/errors.hpp"

namespace mvtrack {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::vector<double> parse_numbers(const std::string& line, int line_no) {
    std::vector<double> values;
    std::istringstream ss(line);
    std::string token;
    while (ss >> token) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            throw ParseError(line_no, "not a number: '" + token + "'");
        }
        if (used != token.size()) {
            throw ParseError(line_no, "trailing characters in '" + token + "'");
        }
        values.push_back(v);
    }
    return values;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path + " for reading");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    return out;
}

bool skippable(const std::string& line) {
    for (char ch : line) {
        if (ch == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(ch))) return false;
    }
    return true;
}

}  // namespace

std::vector<CameraModel> load_calibration(const std::string& path) {
    auto in = open_in(path);
    std::vector<CameraModel> cameras;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        const auto v = parse_numbers(line, line_no);
        if (v.size() != 13 && v.size() != 15) {
            throw ParseError(line_no, "expected 13 or 15 fields, got " +
                                          std::to_string(v.size()));
        }
        CameraModel cam;
        cam.camera_id = static_cast<int>(v[0]);
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 4; ++c) cam.projection(r, c) = v[1 + 4 * r + c];
        }
        if (v.size() == 15) {
            cam.image_width = static_cast<int>(v[13]);
            cam.image_height = static_cast<int>(v[14]);
        }
        cameras.push_back(cam);
    }
    if (cameras.empty()) throw Error("no cameras in " + path);
    return cameras;
}

void write_calibration(const std::string& path, const std::vector<CameraModel>& cameras) {
    auto out = open_out(path);
    for (const auto& cam : cameras) {
        out << cam.camera_id;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 4; ++c) out << ' ' << fmt(cam.projection(r, c));
        }
        if (cam.image_width > 0 && cam.image_height > 0) {
            out << ' ' << cam.image_width << ' ' << cam.image_height;
        }
        out << '\n';
    }
}

DetectionStreams load_detections(const std::string& path) {
    auto in = open_in(path);
    DetectionStreams streams;
    std::string line;
    int line_no = 0;
    int keypoint_count = -1;  // -1: not yet seen a keypoint record
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        const auto v = parse_numbers(line, line_no);
        if (v.size() < 7) {
            throw ParseError(line_no, "expected at least 7 fields, got " +
                                          std::to_string(v.size()));
        }
        const std::size_t extra = v.size() - 7;
        Observation2D obs;
        obs.frame = static_cast<int>(v[0]);
        obs.camera_id = static_cast<int>(v[1]);
        obs.center = Point2D(v[2], v[3]);
        obs.width = v[4];
        obs.height = v[5];
        obs.score = v[6];
        if (obs.frame < 0) throw ParseError(line_no, "negative frame");
        if (!(obs.width > 0.0) || !(obs.height > 0.0)) {
            throw ParseError(line_no, "box width and height must be positive");
        }
        if (extra > 0) {
            if (extra % 3 != 0) {
                throw ParseError(line_no,
                                 "keypoint block must hold 2K floats plus K flags");
            }
            const int k = static_cast<int>(extra / 3);
            if (keypoint_count < 0) keypoint_count = k;
            if (k != keypoint_count) {
                throw SchemaMismatchError("line " + std::to_string(line_no) + ": " +
                                          std::to_string(k) + " keypoints, expected " +
                                          std::to_string(keypoint_count));
            }
            obs.keypoints.resize(k);
            obs.kp_valid.resize(k);
            for (int j = 0; j < k; ++j) {
                obs.keypoints[j] = Point2D(v[7 + 2 * j], v[7 + 2 * j + 1]);
            }
            for (int j = 0; j < k; ++j) {
                obs.kp_valid[j] = v[7 + 2 * k + j] != 0.0 ? 1 : 0;
            }
        }
        auto& frames = streams.by_camera[obs.camera_id];
        if (static_cast<int>(frames.size()) <= obs.frame) frames.resize(obs.frame + 1);
        streams.num_frames = std::max(streams.num_frames, obs.frame + 1);
        frames[obs.frame].push_back(std::move(obs));
    }
    for (auto& [cam, frames] : streams.by_camera) frames.resize(streams.num_frames);
    return streams;
}

void write_detections(const std::string& path, const DetectionStreams& streams) {
    auto out = open_out(path);
    for (int f = 0; f < streams.num_frames; ++f) {
        for (const auto& [cam, frames] : streams.by_camera) {
            if (f >= static_cast<int>(frames.size())) continue;
            for (const auto& obs : frames[f]) {
                out << f << ' ' << cam << ' ' << fmt(obs.center.x()) << ' '
                    << fmt(obs.center.y()) << ' ' << fmt(obs.width) << ' '
                    << fmt(obs.height) << ' ' << fmt(obs.score);
                for (const auto& kp : obs.keypoints) {
                    out << ' ' << fmt(kp.x()) << ' ' << fmt(kp.y());
                }
                for (const auto& valid : obs.kp_valid) {
                    out << ' ' << (valid ? 1 : 0);
                }
                out << '\n';
            }
        }
    }
}

void write_tracks(const std::string& path, const TrajectorySet& trajectories) {
    auto out = open_out(path);
    for (const auto& [id, traj] : trajectories.points) {
        auto poses_it = trajectories.poses.find(id);
        for (const auto& [frame, p] : traj) {
            const Pose3D* pose = nullptr;
            if (poses_it != trajectories.poses.end()) {
                auto f = poses_it->second.find(frame);
                if (f != poses_it->second.end()) {
                    pose = &f->second;
                    if (pose->num_valid() != static_cast<int>(pose->joints.size())) {
                        continue;  // only fully valid poses are serializable
                    }
                }
            }
            out << id << ' ' << frame << ' ' << fmt(p.x()) << ' ' << fmt(p.y()) << ' '
                << fmt(p.z());
            if (pose) {
                for (const auto& j : pose->joints) {
                    out << ' ' << fmt(j.x()) << ' ' << fmt(j.y()) << ' ' << fmt(j.z());
                }
            }
            out << '\n';
        }
    }
}

TrajectorySet load_tracks(const std::string& path) {
    auto in = open_in(path);
    TrajectorySet set;
    std::string line;
    int line_no = 0;
    int joint_count = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        const auto v = parse_numbers(line, line_no);
        if (v.size() < 5) {
            throw ParseError(line_no, "expected at least 5 fields, got " +
                                          std::to_string(v.size()));
        }
        const std::size_t extra = v.size() - 5;
        if (extra % 3 != 0) {
            throw ParseError(line_no, "joint block must hold whole (X, Y, Z) triples");
        }
        const int id = static_cast<int>(v[0]);
        const int frame = static_cast<int>(v[1]);
        set.points[id][frame] = Point3D(v[2], v[3], v[4]);
        if (extra > 0) {
            const int k = static_cast<int>(extra / 3);
            if (joint_count < 0) joint_count = k;
            if (k != joint_count) {
                throw SchemaMismatchError("line " + std::to_string(line_no) + ": " +
                                          std::to_string(k) + " joints, expected " +
                                          std::to_string(joint_count));
            }
            Pose3D pose;
            pose.joints.resize(k);
            pose.valid.assign(k, 1);
            for (int j = 0; j < k; ++j) {
                pose.joints[j] = Point3D(v[5 + 3 * j], v[5 + 3 * j + 1], v[5 + 3 * j + 2]);
            }
            set.poses[id][frame] = std::move(pose);
        }
    }
    return set;
}

std::string report_text(const MotReport& r) {
    std::ostringstream out;
    out << "mota = " << fmt(r.mota) << '\n'
        << "idf1 = " << fmt(r.idf1) << '\n'
        << "mt = " << fmt(r.mt) << '\n'
        << "ml = " << fmt(r.ml) << '\n'
        << "fp = " << r.fp << '\n'
        << "fn = " << r.fn << '\n'
        << "ids = " << r.ids << '\n'
        << "gt_total = " << r.gt_total << '\n'
        << "mean_position_error = " << fmt(r.mean_position_error) << '\n';
    return out.str();
}

std::vector<std::pair<int, int>> load_limbs(const std::string& path) {
    auto in = open_in(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid limb table " + path + ": " + e.what());
    }
    std::vector<std::pair<int, int>> limbs;
    if (!j.is_array()) throw Error("limb table must be a JSON array of pairs");
    for (const auto& entry : j) {
        if (!entry.is_array() || entry.size() != 2) {
            throw Error("limb table entries must be [joint_a, joint_b] pairs");
        }
        limbs.emplace_back(entry[0].get<int>(), entry[1].get<int>());
    }
    return limbs;
}

std::string report_json(const MotReport& r) {
    nlohmann::json j{{"mota", r.mota},
                     {"idf1", r.idf1},
                     {"mt", r.mt},
                     {"ml", r.ml},
                     {"fp", r.fp},
                     {"fn", r.fn},
                     {"ids", r.ids},
                     {"gt_total", r.gt_total},
                     {"mean_position_error", r.mean_position_error}};
    return j.dump(2);
}

}  // namespace mvtrack
