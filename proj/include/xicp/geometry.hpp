#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "xicp/parallel.hpp"

namespace xicp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Rodrigues map so(3) -> SO(3). Uses the series expansion below 1e-8 rad,
/// where the sin/cos path is dominated by rounding noise.
Mat3 exp_rotvec(const Vec3& rotvec);

/// Inverse of exp_rotvec; valid for rotation angles in [0, pi).
Vec3 log_rotmat(const Mat3& rotation);

/// Rigid body transform mapping source-frame points into the target frame:
/// x_target = rotation * x_source + translation.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
};

/// a then b composed as (a ∘ b): apply b first, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform inverse(const RigidTransform& t);

/// 6-DoF optimization update, rotation block first: x = [rotvec; trans].
struct PoseUpdate {
  Vec3 rotvec = Vec3::Zero();
  Vec3 trans = Vec3::Zero();

  Vec6 stacked() const {
    Vec6 x;
    x << rotvec, trans;
    return x;
  }
  static PoseUpdate from_stacked(const Vec6& x) {
    return {x.head<3>(), x.tail<3>()};
  }
};

/// Point cloud with optional per-point unit normals, tagged with the frame
/// the coordinates are expressed in (e.g. "L", "M").
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // empty, or one unit normal per point
  std::string frame;

  std::size_t size() const { return points.size(); }
  bool has_normals() const { return !normals.empty(); }
};

/// Maps points by R p + t and normals by R n, relabeling the frame.
PointCloud apply_transform(const RigidTransform& t, const PointCloud& cloud,
                           const std::string& target_frame,
                           Exec exec = default_exec());

/// Stamped pose, used by trajectories and the simulator.
struct StampedPose {
  double t = 0.0;
  RigidTransform pose;
};

}  // namespace xicp
