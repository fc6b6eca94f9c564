#pragma once

#include <map>
#include <string>
#include <vector>

#include "mvtrack/geometry.hpp"
#include "mvtrack/metrics.hpp"
#include "mvtrack/types.hpp"

namespace mvtrack {

// Detection streams keyed by camera id; inner index is the frame.
struct DetectionStreams {
    std::map<int, std::vector<std::vector<Observation2D>>> by_camera;
    int num_frames = 0;
};

// Calibration file: one record per camera,
//   camera_id p00 p01 ... p23 [image_width image_height]
// with the 12 projection entries row-major. '#' starts a comment line.
std::vector<CameraModel> load_calibration(const std::string& path);
void write_calibration(const std::string& path, const std::vector<CameraModel>& cameras);

// Detection file: one record per observation,
//   frame camera_id x y w h score [x1 y1 ... xK yK v1 ... vK]
// The keypoint block is optional but K must not vary within a file.
DetectionStreams load_detections(const std::string& path);
void write_detections(const std::string& path, const DetectionStreams& streams);

// Track file: one record per (global_id, frame),
//   global_id frame X Y Z [X1 Y1 Z1 ... XK YK ZK]
// Pose-mode records append one triple per joint; only frames with all joints
// valid are written. Floats carry 9 significant digits.
void write_tracks(const std::string& path, const TrajectorySet& trajectories);
TrajectorySet load_tracks(const std::string& path);

// Metric report as key = value lines and as a JSON string.
std::string report_text(const MotReport& report);
std::string report_json(const MotReport& report);

// Limb table file: a JSON array of [joint_a, joint_b] pairs.
std::vector<std::pair<int, int>> load_limbs(const std::string& path);

}  // namespace mvtrack
