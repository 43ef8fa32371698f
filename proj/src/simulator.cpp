#include "xicp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "xicp/error.hpp"

namespace xicp {

namespace {

constexpr double kPi = std::numbers::pi;

int steps_for(double extent, double spacing) {
  return std::max(1, static_cast<int>(std::llround(extent / spacing)));
}

Mat3 yaw_rotation(double yaw) {
  Mat3 r;
  r << std::cos(yaw), -std::sin(yaw), 0.0,  //
      std::sin(yaw), std::cos(yaw), 0.0,    //
      0.0, 0.0, 1.0;
  return r;
}

void add_point(PointCloud& cloud, const Vec3& p, const Vec3& n) {
  cloud.points.push_back(p);
  cloud.normals.push_back(n);
}

/// Axis-aligned grid over a disc in the z = height plane.
void add_disc(PointCloud& cloud, const Vec3& center, double radius,
              double spacing, const Vec3& normal) {
  const int steps = steps_for(2.0 * radius, spacing);
  for (int ix = 0; ix <= steps; ++ix) {
    const double x = -radius + 2.0 * radius * ix / steps;
    for (int iy = 0; iy <= steps; ++iy) {
      const double y = -radius + 2.0 * radius * iy / steps;
      if (x * x + y * y <= radius * radius) {
        add_point(cloud, center + Vec3(x, y, 0.0), normal);
      }
    }
  }
}

void build_tunnel(PointCloud& cloud, const WorldSpec& spec) {
  const double r = spec.tunnel_radius;
  const double length = spec.tunnel_length;
  const double s = spec.surface_point_spacing;
  const int n_axial = steps_for(length, s);
  const int n_arc = steps_for(kPi * r, s);
  const int n_floor = steps_for(2.0 * r, s);
  for (int ia = 0; ia <= n_axial; ++ia) {
    const double x = length * ia / n_axial;
    // Semi-circular arch; the normal points toward the tunnel interior.
    for (int ip = 0; ip <= n_arc; ++ip) {
      const double phi = kPi * ip / n_arc;
      add_point(cloud, Vec3(x, r * std::cos(phi), r * std::sin(phi)),
                Vec3(0.0, -std::cos(phi), -std::sin(phi)));
    }
    for (int iy = 1; iy < n_floor; ++iy) {
      const double y = -r + 2.0 * r * iy / n_floor;
      add_point(cloud, Vec3(x, y, 0.0), Vec3(0.0, 0.0, 1.0));
    }
  }
}

void build_cylinder_room(PointCloud& cloud, const WorldSpec& spec) {
  const double r = spec.cylinder_radius;
  const double h = spec.cylinder_height;
  const double s = spec.surface_point_spacing;
  const int n_circ = steps_for(2.0 * kPi * r, s);
  const int n_height = steps_for(h, s);
  for (int it = 0; it < n_circ; ++it) {
    const double theta = 2.0 * kPi * it / n_circ;
    const Vec3 radial(std::cos(theta), std::sin(theta), 0.0);
    for (int iz = 0; iz <= n_height; ++iz) {
      add_point(cloud, Vec3(r * radial.x(), r * radial.y(), h * iz / n_height),
                -radial);
    }
  }
  add_disc(cloud, Vec3(0.0, 0.0, 0.0), r, s, Vec3(0.0, 0.0, 1.0));
  add_disc(cloud, Vec3(0.0, 0.0, h), r, s, Vec3(0.0, 0.0, -1.0));
}

void build_plane(PointCloud& cloud, const WorldSpec& spec) {
  const double sx = spec.plane_size_x;
  const double sy = spec.plane_size_y;
  const double s = spec.surface_point_spacing;
  const int nx = steps_for(sx, s);
  const int ny = steps_for(sy, s);
  for (int ix = 0; ix <= nx; ++ix) {
    for (int iy = 0; iy <= ny; ++iy) {
      add_point(cloud,
                Vec3(-0.5 * sx + sx * ix / nx, -0.5 * sy + sy * iy / ny, 0.0),
                Vec3(0.0, 0.0, 1.0));
    }
  }
}

void build_combined(PointCloud& cloud, const WorldSpec& spec) {
  const double w = spec.corridor_width;
  const double lc = spec.corridor_length;
  const double wall_h = spec.corridor_wall_height;
  const double ro = spec.open_radius;
  const double s = spec.surface_point_spacing;

  const int n_axial = steps_for(lc, s);
  const int n_height = steps_for(wall_h, s);
  const int n_width = steps_for(w, s);
  for (int ia = 0; ia <= n_axial; ++ia) {
    const double x = lc * ia / n_axial;
    for (int iz = 0; iz <= n_height; ++iz) {
      const double z = wall_h * iz / n_height;
      add_point(cloud, Vec3(x, 0.5 * w, z), Vec3(0.0, -1.0, 0.0));
      add_point(cloud, Vec3(x, -0.5 * w, z), Vec3(0.0, 1.0, 0.0));
    }
    for (int iy = 0; iy <= n_width; ++iy) {
      add_point(cloud, Vec3(x, -0.5 * w + w * iy / n_width, 0.0),
                Vec3(0.0, 0.0, 1.0));
    }
  }

  // Open ground disc meeting the corridor mouth; skip the strip already
  // sampled above.
  const Vec3 disc_center(lc + ro, 0.0, 0.0);
  const int steps = steps_for(2.0 * ro, s);
  for (int ix = 0; ix <= steps; ++ix) {
    const double x = -ro + 2.0 * ro * ix / steps;
    for (int iy = 0; iy <= steps; ++iy) {
      const double y = -ro + 2.0 * ro * iy / steps;
      if (x * x + y * y > ro * ro) {
        continue;
      }
      const Vec3 p = disc_center + Vec3(x, y, 0.0);
      if (p.x() <= lc && std::abs(p.y()) <= 0.5 * w) {
        continue;
      }
      add_point(cloud, p, Vec3(0.0, 0.0, 1.0));
    }
  }
}

void build_box_room(PointCloud& cloud, const WorldSpec& spec) {
  const double bx = spec.box_x;
  const double by = spec.box_y;
  const double bz = spec.box_z;
  const double s = spec.surface_point_spacing;
  const int nx = steps_for(bx, s);
  const int ny = steps_for(by, s);
  const int nz = steps_for(bz, s);
  for (int ix = 0; ix <= nx; ++ix) {
    const double x = -0.5 * bx + bx * ix / nx;
    for (int iy = 0; iy <= ny; ++iy) {
      const double y = -0.5 * by + by * iy / ny;
      add_point(cloud, Vec3(x, y, 0.0), Vec3(0.0, 0.0, 1.0));
      add_point(cloud, Vec3(x, y, bz), Vec3(0.0, 0.0, -1.0));
    }
    for (int iz = 1; iz < nz; ++iz) {
      const double z = bz * iz / nz;
      add_point(cloud, Vec3(x, -0.5 * by, z), Vec3(0.0, 1.0, 0.0));
      add_point(cloud, Vec3(x, 0.5 * by, z), Vec3(0.0, -1.0, 0.0));
    }
  }
  for (int iy = 1; iy < ny; ++iy) {
    const double y = -0.5 * by + by * iy / ny;
    for (int iz = 1; iz < nz; ++iz) {
      const double z = bz * iz / nz;
      add_point(cloud, Vec3(-0.5 * bx, y, z), Vec3(1.0, 0.0, 0.0));
      add_point(cloud, Vec3(0.5 * bx, y, z), Vec3(-1.0, 0.0, 0.0));
    }
  }
}

}  // namespace

WorldKind world_kind_from_string(const std::string& name) {
  if (name == "tunnel") return WorldKind::Tunnel;
  if (name == "cylinder") return WorldKind::CylinderRoom;
  if (name == "plane") return WorldKind::Plane;
  if (name == "combined") return WorldKind::CombinedCorridorOpen;
  if (name == "box") return WorldKind::BoxRoom;
  throw ConfigError("unknown world kind '" + name + "'");
}

const char* to_string(WorldKind kind) {
  switch (kind) {
    case WorldKind::Tunnel:
      return "tunnel";
    case WorldKind::CylinderRoom:
      return "cylinder";
    case WorldKind::Plane:
      return "plane";
    case WorldKind::CombinedCorridorOpen:
      return "combined";
    case WorldKind::BoxRoom:
      return "box";
  }
  return "?";
}

double world_yaw_offset(WorldKind kind) {
  switch (kind) {
    case WorldKind::Tunnel:
    case WorldKind::CombinedCorridorOpen:
      return 20.0 * kPi / 180.0;
    default:
      return 0.0;
  }
}

PointCloud build_world(const WorldSpec& spec) {
  PointCloud cloud;
  cloud.frame = "M";
  switch (spec.kind) {
    case WorldKind::Tunnel:
      build_tunnel(cloud, spec);
      break;
    case WorldKind::CylinderRoom:
      build_cylinder_room(cloud, spec);
      break;
    case WorldKind::Plane:
      build_plane(cloud, spec);
      break;
    case WorldKind::CombinedCorridorOpen:
      build_combined(cloud, spec);
      break;
    case WorldKind::BoxRoom:
      build_box_room(cloud, spec);
      break;
  }
  const double yaw = world_yaw_offset(spec.kind);
  if (yaw != 0.0) {
    const Mat3 r = yaw_rotation(yaw);
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
      cloud.points[i] = r * cloud.points[i];
      cloud.normals[i] = r * cloud.normals[i];
    }
  }
  return cloud;
}

std::vector<StampedPose> sample_trajectory(const TrajectorySpec& spec) {
  if (spec.waypoints.empty()) {
    throw ConfigError("sample_trajectory: no waypoints");
  }
  if (spec.scan_rate <= 0.0) {
    throw ConfigError("sample_trajectory: scan_rate must be positive");
  }

  struct Segment {
    double start = 0.0;
    double duration = 0.0;
    RigidTransform from;
    Vec3 delta_t = Vec3::Zero();
    Vec3 delta_r = Vec3::Zero();
  };
  std::vector<Segment> segments;
  double total = 0.0;
  for (std::size_t i = 1; i < spec.waypoints.size(); ++i) {
    const RigidTransform& a = spec.waypoints[i - 1];
    const RigidTransform& b = spec.waypoints[i];
    Segment seg;
    seg.from = a;
    seg.delta_t = b.translation - a.translation;
    seg.delta_r = log_rotmat(a.rotation.transpose() * b.rotation);
    double duration = 0.0;
    if (spec.linear_speed > 0.0) {
      duration = std::max(duration, seg.delta_t.norm() / spec.linear_speed);
    }
    if (spec.angular_speed > 0.0) {
      duration = std::max(duration, seg.delta_r.norm() / spec.angular_speed);
    }
    if (duration <= 0.0) {
      continue;
    }
    seg.start = total;
    seg.duration = duration;
    total += duration;
    segments.push_back(seg);
  }

  std::vector<StampedPose> poses;
  const double dt = 1.0 / spec.scan_rate;
  const int count = segments.empty()
                        ? 1
                        : static_cast<int>(std::floor(total / dt + 1e-9)) + 1;
  for (int k = 0; k < count; ++k) {
    const double t = k * dt;
    StampedPose stamped;
    stamped.t = t;
    if (segments.empty()) {
      stamped.pose = spec.waypoints.front();
    } else {
      const Segment* seg = &segments.back();
      for (const Segment& candidate : segments) {
        if (t < candidate.start + candidate.duration) {
          seg = &candidate;
          break;
        }
      }
      const double s =
          std::clamp((t - seg->start) / seg->duration, 0.0, 1.0);
      stamped.pose.rotation = seg->from.rotation * exp_rotvec(s * seg->delta_r);
      stamped.pose.translation = seg->from.translation + s * seg->delta_t;
    }
    poses.push_back(stamped);
  }
  return poses;
}

PointCloud simulate_scan(const PointCloud& world,
                         const RigidTransform& sensor_pose, double max_range,
                         const NoiseSpec& noise, int max_points,
                         std::uint64_t scan_seed) {
  if (world.size() == 0 || !world.has_normals()) {
    throw Error("simulate_scan: world must be non-empty with normals");
  }

  const Vec3 sensor = sensor_pose.translation;
  std::vector<int> visible;
  for (std::size_t i = 0; i < world.size(); ++i) {
    const Vec3 to_sensor = sensor - world.points[i];
    if (to_sensor.norm() <= max_range &&
        world.normals[i].dot(to_sensor) > 0.0) {
      visible.push_back(static_cast<int>(i));
    }
  }
  if (visible.empty()) {
    throw EmptyScan("simulate_scan: no world points visible");
  }

  std::mt19937_64 rng(seed_mix(noise.seed, scan_seed, 0x5ca9));
  if (max_points > 0 && static_cast<int>(visible.size()) > max_points) {
    std::vector<int> sampled;
    sampled.reserve(max_points);
    std::sample(visible.begin(), visible.end(), std::back_inserter(sampled),
                max_points, rng);
    visible = std::move(sampled);  // std::sample keeps ascending order
  }

  const Mat3 rt = sensor_pose.rotation.transpose();
  PointCloud scan;
  scan.frame = "L";
  scan.points.reserve(visible.size());
  scan.normals.reserve(visible.size());
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  for (int idx : visible) {
    Vec3 p = rt * (world.points[idx] - sensor);
    if (noise.range_noise > 0.0) {
      const double range = p.norm();
      if (range > 0.0) {
        p += (p / range) * (unit_normal(rng) * noise.range_noise);
      }
    }
    scan.points.push_back(p);
    scan.normals.push_back(rt * world.normals[idx]);
  }
  return scan;
}

RigidTransform perturb_prior(const RigidTransform& true_delta,
                             double linear_speed, double angular_speed,
                             const NoiseSpec& noise, std::uint64_t seed) {
  const double std_t = noise.sigma_t_per_speed * (linear_speed / 0.5);
  const double std_r = noise.sigma_r_per_speed * (angular_speed / 0.2);

  std::mt19937_64 rng(seed_mix(noise.seed, seed, 0x9e1d));
  std::normal_distribution<double> unit(0.0, 1.0);
  Vec3 dt = Vec3::Zero();
  Vec3 dr = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    dt[i] = std_t > 0.0 ? std_t * unit(rng) : 0.0;
  }
  for (int i = 0; i < 3; ++i) {
    dr[i] = std_r > 0.0 ? std_r * unit(rng) : 0.0;
  }
  return compose(true_delta, RigidTransform{exp_rotvec(dr), dt});
}

std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // splitmix64 over the concatenated inputs.
  std::uint64_t x = a;
  for (std::uint64_t v : {b, c}) {
    x += 0x9e3779b97f4a7c15ULL + v;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
  }
  return x;
}

}  // namespace xicp
