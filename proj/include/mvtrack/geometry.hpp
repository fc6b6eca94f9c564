#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <vector>

#include "mvtrack/types.hpp"

namespace mvtrack {

using ProjectionMatrix = Eigen::Matrix<double, 3, 4>;

// Finite perspective camera: x ~ P * (X, 1).
struct CameraModel {
    int camera_id = 0;
    ProjectionMatrix projection = ProjectionMatrix::Zero();
    int image_width = 0;   // 0 when calibration does not state it
    int image_height = 0;

    // Camera center C with P * (C, 1) = 0.
    Point3D center() const;
};

// Fundamental matrix for an ordered camera pair: the epipolar line of a point
// x in from_camera is F * (x, 1) in to_camera. F(i->j) = F(j->i)^T.
struct FundamentalPair {
    int from_camera = 0;
    int to_camera = 0;
    Eigen::Matrix3d F = Eigen::Matrix3d::Zero();
};

// Implicit 2D line a*x + b*y + c = 0.
struct Line2D {
    double a = 0.0, b = 0.0, c = 0.0;
};

struct Projection {
    Point2D pixel = Point2D::Zero();
    bool behind_camera = false;
};

struct TriangulationResult {
    Point3D point = Point3D::Zero();
    double residual = 0.0;  // norm of A*X on the conditioned system
};

// F = [e']_x * P_j * pinv(P_i) with e' = P_j * C_i, scaled to unit Frobenius
// norm. Throws DegenerateRigError when the camera centers coincide.
FundamentalPair fundamental_from_projections(const CameraModel& from,
                                             const CameraModel& to);

// l = F * (x, y, 1), unnormalized. Throws NullLineError when the result is
// the zero vector (x is the epipole of an exactly rank-deficient F).
Line2D epipolar_line(const Eigen::Matrix3d& F, const Point2D& x);

// |a*x + b*y + c| / sqrt(a^2 + b^2). Throws NullLineError when a = b = 0.
double point_line_distance(const Point2D& x, const Line2D& l);

// Scale-normalized symmetric epipolar distance between two cross-view boxes:
// each point-to-line distance is divided by that observation's |w + h|, so
// the value is invariant to the object-to-camera range. The pair may be given
// in either direction. Throws DegenerateBoxError when w + h = 0 on a side.
double normalized_pair_distance(const Observation2D& a, const Observation2D& b,
                                const FundamentalPair& pair);

// Keypoint-mode variant: the mean of normalized_pair_distance over jointly
// valid joints, with each observation's enclosing box as the denominator.
// Throws NoCommonJointsError when no joint is valid in both.
double pose_pair_distance(const Observation2D& a, const Observation2D& b,
                          const FundamentalPair& pair);

// Two-view linear triangulation. Pixel coordinates are re-centered per view
// before the 4x4 homogeneous system is solved by SVD. Throws
// DegenerateBaselineError when the two smallest singular values coincide and
// InfinitePointError when the solution lies at infinity.
TriangulationResult triangulate_pair(const Point2D& a, const Point2D& b,
                                     const CameraModel& cam_a,
                                     const CameraModel& cam_b);

// Pinhole projection, dehomogenized. behind_camera is set when the
// homogeneous depth is <= 0.
Projection project(const CameraModel& cam, const Point3D& X);

// Calibrated rig: the cameras plus fundamental matrices cached for every
// ordered pair at construction.
class CameraRig {
public:
    CameraRig() = default;
    explicit CameraRig(std::vector<CameraModel> cameras);

    const std::vector<CameraModel>& cameras() const { return cameras_; }
    const CameraModel& camera(int camera_id) const;
    const FundamentalPair& fundamental(int from_id, int to_id) const;
    std::size_t size() const { return cameras_.size(); }

    // Distance dispatch used by the association stage.
    double pair_distance(const Observation2D& a, const Observation2D& b,
                         bool pose_mode) const;

private:
    std::vector<CameraModel> cameras_;
    std::map<int, std::size_t> index_by_id_;
    std::map<std::pair<int, int>, FundamentalPair> fundamentals_;
};

}  // namespace mvtrack
