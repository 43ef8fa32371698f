#include "xicp/geometry.hpp"

#include <cmath>

namespace xicp {

namespace {
constexpr double kSmallAngle = 1e-8;
}

Mat3 exp_rotvec(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  Mat3 skew;
  skew << 0.0, -rotvec.z(), rotvec.y(),  //
      rotvec.z(), 0.0, -rotvec.x(),      //
      -rotvec.y(), rotvec.x(), 0.0;
  if (angle < kSmallAngle) {
    // First-order series; the quadratic term is below double rounding here.
    return Mat3::Identity() + skew + 0.5 * skew * skew;
  }
  const double s = std::sin(angle) / angle;
  const double c = (1.0 - std::cos(angle)) / (angle * angle);
  return Mat3::Identity() + s * skew + c * skew * skew;
}

Vec3 log_rotmat(const Mat3& rotation) {
  const double cos_angle =
      std::min(1.0, std::max(-1.0, (rotation.trace() - 1.0) * 0.5));
  const double angle = std::acos(cos_angle);
  Vec3 axis_times_two_sin(rotation(2, 1) - rotation(1, 2),
                          rotation(0, 2) - rotation(2, 0),
                          rotation(1, 0) - rotation(0, 1));
  if (angle < kSmallAngle) {
    return 0.5 * axis_times_two_sin;
  }
  const double sin_angle = std::sin(angle);
  if (sin_angle > 1e-7) {
    return axis_times_two_sin * (angle / (2.0 * sin_angle));
  }
  // Near pi the skew part vanishes; recover the axis from the symmetric part.
  const Mat3 sym = 0.5 * (rotation + Mat3::Identity());
  Vec3 axis(std::sqrt(std::max(0.0, sym(0, 0))),
            std::sqrt(std::max(0.0, sym(1, 1))),
            std::sqrt(std::max(0.0, sym(2, 2))));
  int major = 0;
  sym.diagonal().maxCoeff(&major);
  for (int i = 0; i < 3; ++i) {
    if (i != major && sym(major, i) < 0.0) {
      axis[i] = -axis[i];
    }
  }
  if (axis[major] < 0.0) {
    axis = -axis;
  }
  axis.normalize();
  return angle * axis;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

RigidTransform inverse(const RigidTransform& t) {
  const Mat3 rt = t.rotation.transpose();
  return {rt, -(rt * t.translation)};
}

PointCloud apply_transform(const RigidTransform& t, const PointCloud& cloud,
                           const std::string& target_frame, Exec exec) {
  PointCloud out;
  out.frame = target_frame;
  out.points.resize(cloud.points.size());
  out.normals.resize(cloud.normals.size());
  const auto n = static_cast<std::ptrdiff_t>(cloud.points.size());
  parallel_for(
      n,
      [&](std::ptrdiff_t i) {
        out.points[i] = t.rotation * cloud.points[i] + t.translation;
        if (!cloud.normals.empty()) {
          out.normals[i] = t.rotation * cloud.normals[i];
        }
      },
      exec);
  return out;
}

}  // namespace xicp
