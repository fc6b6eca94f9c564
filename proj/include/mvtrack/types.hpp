#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <vector>

namespace mvtrack {

using Point2D = Eigen::Vector2d;
using Point3D = Eigen::Vector3d;

// One person observation in one camera at one frame. Box is center + size;
// keypoints are optional (pose mode) with a per-joint validity mask.
struct Observation2D {
    int frame = 0;
    int camera_id = 0;
    Point2D center = Point2D::Zero();
    double width = 0.0;
    double height = 0.0;
    double score = 1.0;
    std::vector<Point2D> keypoints;     // empty in box mode
    std::vector<std::uint8_t> kp_valid; // same length as keypoints
    bool synthetic = false;             // set on interpolated infill

    bool has_keypoints() const { return !keypoints.empty(); }
    double scale() const { return width + height; }
};

// Time-indexed observations of one local track in one camera. Gaps allowed;
// std::map keeps frames strictly increasing.
struct Tracklet2D {
    int camera_id = 0;
    int local_id = 0;
    bool confirmed = true;
    std::map<int, Observation2D> obs;

    bool empty() const { return obs.empty(); }
    int first_frame() const { return obs.begin()->first; }
    int last_frame() const { return obs.rbegin()->first; }
    const Observation2D* at(int frame) const {
        auto it = obs.find(frame);
        return it == obs.end() ? nullptr : &it->second;
    }
};

// 3D pose sample: fixed-size joint array with validity mask.
struct Pose3D {
    std::vector<Point3D> joints;
    std::vector<std::uint8_t> valid;

    int num_valid() const {
        int n = 0;
        for (auto v : valid) n += v ? 1 : 0;
        return n;
    }
};

}  // namespace mvtrack
