#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xicp/geometry.hpp"

namespace xicp {

enum class WorldKind { Tunnel, CylinderRoom, Plane, CombinedCorridorOpen, BoxRoom };

WorldKind world_kind_from_string(const std::string& name);
const char* to_string(WorldKind kind);

/// Synthetic world description. Dimensions are kind-specific; unused fields
/// are ignored. The tunnel and combined worlds are rotated 20 degrees about z
/// so the degenerate direction does not align with the map axes.
struct WorldSpec {
  WorldKind kind = WorldKind::BoxRoom;
  double tunnel_radius = 3.0;
  double tunnel_length = 60.0;
  double cylinder_radius = 8.0;
  double cylinder_height = 4.0;
  double plane_size_x = 20.0;
  double plane_size_y = 20.0;
  double corridor_width = 4.0;
  double corridor_length = 40.0;
  double corridor_wall_height = 3.0;
  double open_radius = 20.0;
  double box_x = 10.0;
  double box_y = 8.0;
  double box_z = 4.0;
  double surface_point_spacing = 0.1;
  std::uint64_t seed = 0;
};

/// Yaw offset between the map frame and the world's degenerate direction.
double world_yaw_offset(WorldKind kind);

/// Deterministic surface sampling with analytically exact normals; normals
/// point into the interior the sensor moves through. Frame is "M".
PointCloud build_world(const WorldSpec& spec);

struct TrajectorySpec {
  std::vector<RigidTransform> waypoints;
  double linear_speed = 0.5;   // m/s
  double angular_speed = 0.2;  // rad/s
  double scan_rate = 2.0;      // Hz
};

/// Samples poses at scan_rate along the waypoint path. Each segment is a
/// constant-twist interpolation whose duration is set by the slower of the
/// linear and angular speed limits.
std::vector<StampedPose> sample_trajectory(const TrajectorySpec& spec);

struct NoiseSpec {
  double sigma_t_per_speed = 0.0125;  // meters std at 0.5 m/s
  double sigma_r_per_speed = 0.005;   // radians std at 0.2 rad/s
  double range_noise = 0.01;          // meters, per-point along the ray
  std::uint64_t seed = 0;
};

/// World points within max_range that face the sensor, expressed in the
/// sensor frame, capped at max_points by seeded uniform subsampling, then
/// perturbed along the viewing ray by Gaussian range noise. Throws EmptyScan
/// when nothing is visible.
PointCloud simulate_scan(const PointCloud& world,
                         const RigidTransform& sensor_pose, double max_range,
                         const NoiseSpec& noise, int max_points = 8192,
                         std::uint64_t scan_seed = 0);

/// Velocity-dependent prior noise: per-axis normal draws with standard
/// deviations sigma_t_per_speed * (linear_speed / 0.5) and
/// sigma_r_per_speed * (angular_speed / 0.2), right-composed onto true_delta.
RigidTransform perturb_prior(const RigidTransform& true_delta,
                             double linear_speed, double angular_speed,
                             const NoiseSpec& noise, std::uint64_t seed);

/// Stable seed mixing for per-frame sub-streams.
std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0);

}  // namespace xicp
