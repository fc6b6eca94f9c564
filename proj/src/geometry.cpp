#include "mvtrack/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "mvtrack/errors.hpp"

namespace mvtrack {

namespace {

Eigen::Matrix3d cross_matrix(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return m;
}

}  // namespace

Point3D CameraModel::center() const {
    // Right null vector of P.
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(projection, Eigen::ComputeFullV);
    Eigen::Vector4d c = svd.matrixV().col(3);
    if (std::abs(c(3)) < 1e-14) {
        throw DegenerateRigError("camera center at infinity (projection not a finite camera)");
    }
    return c.head<3>() / c(3);
}

FundamentalPair fundamental_from_projections(const CameraModel& from, const CameraModel& to) {
    const Point3D c_from = from.center();
    const Point3D c_to = to.center();
    // Distinct centers are required for the epipole to exist. Tolerance is
    // relative to the rig scale.
    const double sep = (c_from - c_to).norm();
    if (sep < 1e-9 * std::max(1.0, c_from.norm() + c_to.norm())) {
        throw DegenerateRigError("camera centers coincide; fundamental matrix undefined");
    }

    Eigen::Vector4d c_h;
    c_h << c_from, 1.0;
    const Eigen::Vector3d epipole = to.projection * c_h;

    const Eigen::Matrix<double, 4, 3> pinv =
        from.projection.completeOrthogonalDecomposition().pseudoInverse();
    Eigen::Matrix3d F = cross_matrix(epipole) * (to.projection * pinv);

    const double norm = F.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw DegenerateRigError("degenerate projection pair");
    }
    F /= norm;

    FundamentalPair pair;
    pair.from_camera = from.camera_id;
    pair.to_camera = to.camera_id;
    pair.F = F;
    return pair;
}

Line2D epipolar_line(const Eigen::Matrix3d& F, const Point2D& x) {
    const Eigen::Vector3d l = F * Eigen::Vector3d(x.x(), x.y(), 1.0);
    if (l.x() == 0.0 && l.y() == 0.0 && l.z() == 0.0) {
        throw NullLineError("epipolar line degenerated to the zero vector");
    }
    return {l.x(), l.y(), l.z()};
}

double point_line_distance(const Point2D& x, const Line2D& l) {
    const double n2 = l.a * l.a + l.b * l.b;
    if (n2 == 0.0) {
        throw NullLineError("line has no direction (a = b = 0)");
    }
    return std::abs(l.a * x.x() + l.b * x.y() + l.c) / std::sqrt(n2);
}

namespace {

// One side of the symmetric sum: distance of `target` to the epipolar line of
// `source`, divided by the target box scale.
double one_sided(const Point2D& source, const Point2D& target, double target_scale,
                 const Eigen::Matrix3d& F_source_to_target) {
    const Line2D l = epipolar_line(F_source_to_target, source);
    return point_line_distance(target, l) / target_scale;
}

// Orient the pair as (F a->b); the stored direction may be either.
Eigen::Matrix3d oriented_F(const Observation2D& a, const Observation2D& b,
                           const FundamentalPair& pair) {
    if (pair.from_camera == a.camera_id && pair.to_camera == b.camera_id) {
        return pair.F;
    }
    if (pair.from_camera == b.camera_id && pair.to_camera == a.camera_id) {
        return pair.F.transpose();
    }
    throw Error("fundamental pair does not connect the observations' cameras");
}

}  // namespace

double normalized_pair_distance(const Observation2D& a, const Observation2D& b,
                                const FundamentalPair& pair) {
    const double scale_a = std::abs(a.scale());
    const double scale_b = std::abs(b.scale());
    if (scale_a == 0.0 || scale_b == 0.0) {
        throw DegenerateBoxError("box with w + h = 0 cannot normalize the distance");
    }
    const Eigen::Matrix3d F_ab = oriented_F(a, b, pair);
    const Eigen::Matrix3d F_ba = F_ab.transpose();
    const double term_a = one_sided(b.center, a.center, scale_a, F_ba);
    const double term_b = one_sided(a.center, b.center, scale_b, F_ab);
    return term_a + term_b;
}

double pose_pair_distance(const Observation2D& a, const Observation2D& b,
                          const FundamentalPair& pair) {
    const double scale_a = std::abs(a.scale());
    const double scale_b = std::abs(b.scale());
    if (scale_a == 0.0 || scale_b == 0.0) {
        throw DegenerateBoxError("box with w + h = 0 cannot normalize the distance");
    }
    const std::size_t joints = std::min(a.keypoints.size(), b.keypoints.size());
    const Eigen::Matrix3d F_ab = oriented_F(a, b, pair);
    const Eigen::Matrix3d F_ba = F_ab.transpose();

    double sum = 0.0;
    int used = 0;
    for (std::size_t j = 0; j < joints; ++j) {
        if (!a.kp_valid[j] || !b.kp_valid[j]) continue;
        sum += one_sided(b.keypoints[j], a.keypoints[j], scale_a, F_ba) +
               one_sided(a.keypoints[j], b.keypoints[j], scale_b, F_ab);
        ++used;
    }
    if (used == 0) {
        throw NoCommonJointsError("no joint valid in both observations");
    }
    return sum / used;
}

TriangulationResult triangulate_pair(const Point2D& a, const Point2D& b,
                                     const CameraModel& cam_a, const CameraModel& cam_b) {
    // Re-center each view on its measurement so the stacked rows are built
    // from (0, 0); rows are then scaled to unit norm.
    Eigen::Matrix4d A;
    const ProjectionMatrix* projections[2] = {&cam_a.projection, &cam_b.projection};
    const Point2D* points[2] = {&a, &b};
    for (int v = 0; v < 2; ++v) {
        const ProjectionMatrix& P = *projections[v];
        const Point2D& x = *points[v];
        Eigen::Matrix<double, 1, 4> row0 = x.x() * P.row(2) - P.row(0);
        Eigen::Matrix<double, 1, 4> row1 = x.y() * P.row(2) - P.row(1);
        const double n0 = row0.norm();
        const double n1 = row1.norm();
        A.row(2 * v) = n0 > 0 ? (row0 / n0).eval() : row0;
        A.row(2 * v + 1) = n1 > 0 ? (row1 / n1).eval() : row1;
    }

    Eigen::JacobiSVD<Eigen::Matrix4d> svd(A, Eigen::ComputeFullV);
    const Eigen::Vector4d sv = svd.singularValues();
    if (sv(2) - sv(3) <= 1e-10 * std::max(sv(0), 1.0)) {
        throw DegenerateBaselineError("rays parallel or cameras coincident");
    }
    Eigen::Vector4d X = svd.matrixV().col(3);
    if (std::abs(X(3)) < 1e-12) {
        throw InfinitePointError("triangulated point at infinity");
    }

    TriangulationResult result;
    result.point = X.head<3>() / X(3);
    result.residual = (A * X).norm();
    return result;
}

Projection project(const CameraModel& cam, const Point3D& X) {
    Eigen::Vector4d X_h;
    X_h << X, 1.0;
    const Eigen::Vector3d x = cam.projection * X_h;
    if (std::abs(x.z()) < 1e-15) {
        throw Error("point on principal plane; projection undefined");
    }
    Projection p;
    p.pixel = x.head<2>() / x.z();
    p.behind_camera = x.z() <= 0.0;
    return p;
}

CameraRig::CameraRig(std::vector<CameraModel> cameras) : cameras_(std::move(cameras)) {
    for (std::size_t i = 0; i < cameras_.size(); ++i) {
        index_by_id_[cameras_[i].camera_id] = i;
    }
    for (const auto& from : cameras_) {
        for (const auto& to : cameras_) {
            if (from.camera_id == to.camera_id) continue;
            auto key = std::make_pair(from.camera_id, to.camera_id);
            auto rev = std::make_pair(to.camera_id, from.camera_id);
            auto it = fundamentals_.find(rev);
            if (it != fundamentals_.end()) {
                // Keep the two directions exact transposes of each other.
                FundamentalPair pair;
                pair.from_camera = from.camera_id;
                pair.to_camera = to.camera_id;
                pair.F = it->second.F.transpose();
                fundamentals_.emplace(key, std::move(pair));
            } else {
                fundamentals_.emplace(key, fundamental_from_projections(from, to));
            }
        }
    }
}

const CameraModel& CameraRig::camera(int camera_id) const {
    auto it = index_by_id_.find(camera_id);
    if (it == index_by_id_.end()) {
        throw Error("unknown camera id " + std::to_string(camera_id));
    }
    return cameras_[it->second];
}

const FundamentalPair& CameraRig::fundamental(int from_id, int to_id) const {
    auto it = fundamentals_.find({from_id, to_id});
    if (it == fundamentals_.end()) {
        throw Error("no fundamental matrix cached for pair " + std::to_string(from_id) +
                    " -> " + std::to_string(to_id));
    }
    return it->second;
}

double CameraRig::pair_distance(const Observation2D& a, const Observation2D& b,
                                bool pose_mode) const {
    const FundamentalPair& pair = fundamental(a.camera_id, b.camera_id);
    if (pose_mode && a.has_keypoints() && b.has_keypoints()) {
        return pose_pair_distance(a, b, pair);
    }
    return normalized_pair_distance(a, b, pair);
}

}  // namespace mvtrack
