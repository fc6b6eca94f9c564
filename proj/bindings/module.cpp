#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "mvtrack/association.hpp"
#include "mvtrack/config.hpp"
#include "mvtrack/errors.hpp"
#include "mvtrack/io.hpp"
#include "mvtrack/metrics.hpp"
#include "mvtrack/pipeline.hpp"
#include "mvtrack/simulator.hpp"
#include "mvtrack/triangulation.hpp"
#include "mvtrack/version.hpp"

namespace py = pybind11;
using namespace mvtrack;

namespace {

CameraModel camera_from_matrix(int camera_id, const Eigen::Matrix<double, 3, 4>& P) {
    CameraModel cam;
    cam.camera_id = camera_id;
    cam.projection = P;
    return cam;
}

// Distance matrix encoding for python callers: finite values as themselves,
// NaN for incalculable, +inf for forbidden.
std::vector<std::vector<TrackletDistance>> matrix_from_array(
    const Eigen::MatrixXd& m) {
    std::vector<std::vector<TrackletDistance>> out(
        m.rows(), std::vector<TrackletDistance>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            if (std::isnan(v)) {
                out[i][j] = TrackletDistance::incalculable();
            } else if (std::isinf(v)) {
                out[i][j] = TrackletDistance::forbidden();
            } else {
                out[i][j] = TrackletDistance::finite(v);
            }
        }
    }
    return out;
}

TrajectorySet trajectories_from_dict(const py::dict& d) {
    TrajectorySet set;
    for (const auto& [id_obj, traj_obj] : d) {
        const int id = id_obj.cast<int>();
        for (const auto& [frame_obj, pos_obj] : traj_obj.cast<py::dict>()) {
            set.points[id][frame_obj.cast<int>()] = pos_obj.cast<Point3D>();
        }
    }
    return set;
}

py::dict trajectories_to_dict(const TrajectorySet& set) {
    py::dict out;
    for (const auto& [id, traj] : set.points) {
        py::dict frames;
        for (const auto& [f, p] : traj) frames[py::int_(f)] = p;
        out[py::int_(id)] = frames;
    }
    return out;
}

py::dict report_to_dict(const MotReport& r) {
    py::dict d;
    d["mota"] = r.mota;
    d["idf1"] = r.idf1;
    d["mt"] = r.mt;
    d["ml"] = r.ml;
    d["fp"] = r.fp;
    d["fn"] = r.fn;
    d["ids"] = r.ids;
    d["gt_total"] = r.gt_total;
    d["mean_position_error"] = r.mean_position_error;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-view multi-person 3D tracking: epipolar tracklet association, "
              "robust multi-frame triangulation and sliding-window linking.";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "MvtrackError");

    // Geometry on raw matrices.
    m.def(
        "fundamental_from_projections",
        [](const Eigen::Matrix<double, 3, 4>& P_from,
           const Eigen::Matrix<double, 3, 4>& P_to) {
            return fundamental_from_projections(camera_from_matrix(0, P_from),
                                                camera_from_matrix(1, P_to))
                .F;
        },
        py::arg("P_from"), py::arg("P_to"),
        "Fundamental matrix mapping points in the first camera to epipolar lines "
        "in the second, unit Frobenius norm.");
    m.def(
        "project",
        [](const Eigen::Matrix<double, 3, 4>& P, const Point3D& X) {
            const auto p = project(camera_from_matrix(0, P), X);
            return py::make_tuple(p.pixel, p.behind_camera);
        },
        py::arg("P"), py::arg("X"), "Pinhole projection: (pixel, behind_camera).");
    m.def(
        "triangulate_pair",
        [](const Point2D& a, const Point2D& b, const Eigen::Matrix<double, 3, 4>& P_a,
           const Eigen::Matrix<double, 3, 4>& P_b) {
            const auto r = triangulate_pair(a, b, camera_from_matrix(0, P_a),
                                            camera_from_matrix(1, P_b));
            return py::make_tuple(r.point, r.residual);
        },
        py::arg("a"), py::arg("b"), py::arg("P_a"), py::arg("P_b"),
        "Two-view linear triangulation: (point, residual).");
    m.def(
        "epipolar_line",
        [](const Eigen::Matrix3d& F, const Point2D& x) {
            const Line2D l = epipolar_line(F, x);
            return py::make_tuple(l.a, l.b, l.c);
        },
        py::arg("F"), py::arg("x"));
    m.def(
        "point_line_distance",
        [](const Point2D& x, double a, double b, double c) {
            return point_line_distance(x, {a, b, c});
        },
        py::arg("x"), py::arg("a"), py::arg("b"), py::arg("c"));
    m.def(
        "normalized_pair_distance",
        [](const Point2D& center_a, double w_a, double h_a, const Point2D& center_b,
           double w_b, double h_b, const Eigen::Matrix3d& F_a_to_b) {
            Observation2D a, b;
            a.camera_id = 0;
            a.center = center_a;
            a.width = w_a;
            a.height = h_a;
            b.camera_id = 1;
            b.center = center_b;
            b.width = w_b;
            b.height = h_b;
            FundamentalPair pair;
            pair.from_camera = 0;
            pair.to_camera = 1;
            pair.F = F_a_to_b;
            return normalized_pair_distance(a, b, pair);
        },
        py::arg("center_a"), py::arg("w_a"), py::arg("h_a"), py::arg("center_b"),
        py::arg("w_b"), py::arg("h_b"), py::arg("F_a_to_b"),
        "Symmetric epipolar distance between two boxes, each term divided by "
        "that box's |w + h|.");

    // Clustering.
    m.def(
        "pdnc",
        [](const Eigen::MatrixXd& distances, double lam) {
            return pdnc(matrix_from_array(distances), lam).clusters;
        },
        py::arg("distances"), py::arg("lam"),
        "Propagable distance-based non-parametric clustering. Encode incalculable "
        "entries as NaN and same-camera conflicts as +inf.");
    m.def("complete_linkage_3d", &complete_linkage_3d, py::arg("points"),
          py::arg("kappa"));
    m.def(
        "fuse_largest",
        [](const std::vector<Point3D>& points, double kappa) {
            const auto fused =
                fuse_largest(complete_linkage_3d(points, kappa), points, kappa);
            return py::make_tuple(fused.point, fused.inliers);
        },
        py::arg("points"), py::arg("kappa"),
        "Cluster candidates at kappa and fuse the largest cluster: "
        "(point, inlier_indices).");

    // Assignment.
    m.def(
        "solve_assignment",
        [](const std::vector<std::vector<double>>& cost, double gate) {
            const auto r = solve_assignment(cost, gate);
            return py::make_tuple(r.matches, r.unmatched_rows, r.unmatched_cols,
                                  r.total_cost);
        },
        py::arg("cost"), py::arg("gate") = std::numeric_limits<double>::infinity(),
        "Min-cost maximum-cardinality matching; entries above the gate, inf or NaN "
        "are infeasible.");

    // Metrics on {id: {frame: (x, y, z)}} dicts.
    m.def(
        "evaluate_tracking",
        [](const py::dict& gt, const py::dict& pred, double threshold) {
            return report_to_dict(evaluate_tracking(trajectories_from_dict(gt),
                                                    trajectories_from_dict(pred),
                                                    threshold));
        },
        py::arg("gt"), py::arg("pred"), py::arg("threshold") = 0.5);

    // File-level pipeline.
    m.def(
        "run_pipeline",
        [](const std::string& calib_path, const std::string& detections_path,
           const std::string& config_json) {
            const PipelineConfig cfg = config_json.empty()
                                           ? PipelineConfig{}
                                           : config_from_json_text(config_json);
            const CameraRig rig(load_calibration(calib_path));
            const auto result = run_pipeline(load_detections(detections_path), rig, cfg);
            py::dict out;
            out["trajectories"] = trajectories_to_dict(result.trajectories);
            out["empty_frames"] = result.diagnostics.empty_frames;
            out["dropped_clusters"] = result.diagnostics.dropped_clusters;
            return out;
        },
        py::arg("calibration"), py::arg("detections"), py::arg("config_json") = "",
        "Run the full pipeline on calibration and detection files.");
    m.def(
        "simulate",
        [](const std::string& out_dir, int persons, int cameras, int frames,
           std::uint64_t seed, double pixel_sigma, double miss_rate, double fp_rate,
           bool poses) {
            SceneConfig cfg;
            cfg.n_persons = persons;
            cfg.n_cameras = cameras;
            cfg.duration = frames;
            cfg.seed = seed;
            cfg.with_poses = poses;
            NoiseConfig noise;
            noise.seed = seed + 1;
            noise.pixel_sigma = pixel_sigma;
            noise.miss_rate = miss_rate;
            noise.fp_rate = fp_rate;
            const Scene scene = generate_scene(cfg);
            const RenderResult rendered = render_detections(scene, cfg, noise);
            write_calibration(out_dir + "/calibration.txt", scene.cameras);
            DetectionStreams streams;
            streams.num_frames = frames;
            for (int c = 0; c < cameras; ++c) {
                streams.by_camera[c] = rendered.detections[c];
            }
            write_detections(out_dir + "/detections.txt", streams);
            write_tracks(out_dir + "/gt_tracks.txt", scene.ground_truth);
        },
        py::arg("out_dir"), py::arg("persons") = 5, py::arg("cameras") = 4,
        py::arg("frames") = 600, py::arg("seed") = 1, py::arg("pixel_sigma") = 0.0,
        py::arg("miss_rate") = 0.0, py::arg("fp_rate") = 0.0, py::arg("poses") = false,
        "Write a synthetic scene (calibration, detections, ground truth) to a "
        "directory.");
    m.def("load_tracks_as_dict",
          [](const std::string& path) { return trajectories_to_dict(load_tracks(path)); },
          py::arg("path"));
    m.def("default_config_json", [] { return config_to_json_text(PipelineConfig{}); });
    m.def(
        "ablate_triangulation",
        [](int cameras, int frames, double pair_fraction, double pixel_sigma,
           std::uint64_t seed) {
            const auto r =
                ablate_triangulation(cameras, frames, pair_fraction, pixel_sigma, seed);
            py::dict d;
            d["median_error_cmmt"] = r.median_cmmt;
            d["median_error_ransac"] = r.median_ransac;
            d["median_error_plain"] = r.median_plain;
            d["corrupted_pair_fraction"] = r.corrupted_pair_fraction;
            return d;
        },
        py::arg("cameras") = 5, py::arg("frames") = 500, py::arg("pair_fraction") = 0.4,
        py::arg("pixel_sigma") = 2.0, py::arg("seed") = 21);
}
