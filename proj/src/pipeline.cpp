#include "xicp/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "xicp/error.hpp"

namespace xicp {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

DegeneracyHandler handler_from_string(const std::string& name) {
  if (name == "none") return DegeneracyHandler::None;
  if (name == "xicp") return DegeneracyHandler::XIcp;
  if (name == "xs-icp") return DegeneracyHandler::XsIcp;
  if (name == "remap") return DegeneracyHandler::SolutionRemapping;
  if (name == "remap-adaptive") return DegeneracyHandler::AdaptiveRemapping;
  throw ConfigError("unknown handler '" + name +
                    "' (expected none|xicp|xs-icp|remap|remap-adaptive)");
}

const char* to_string(DegeneracyHandler handler) {
  switch (handler) {
    case DegeneracyHandler::None:
      return "none";
    case DegeneracyHandler::XIcp:
      return "xicp";
    case DegeneracyHandler::XsIcp:
      return "xs-icp";
    case DegeneracyHandler::SolutionRemapping:
      return "remap";
    case DegeneracyHandler::AdaptiveRemapping:
      return "remap-adaptive";
  }
  return "?";
}

std::vector<RigidTransform> face_forward_waypoints(
    const std::vector<Vec3>& positions) {
  std::vector<double> bearings(positions.size(), 0.0);
  double last_bearing = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    // Outgoing bearing; the final waypoint keeps the incoming one.
    std::size_t j = i + 1;
    while (j < positions.size() &&
           (positions[j] - positions[i]).head<2>().norm() < 1e-12) {
      ++j;
    }
    if (j < positions.size()) {
      const Vec3 d = positions[j] - positions[i];
      last_bearing = std::atan2(d.y(), d.x());
    }
    bearings[i] = last_bearing;
  }

  // Turn in place at bearing changes: the moving segments keep a constant
  // heading and rotation happens between them.
  std::vector<RigidTransform> waypoints;
  auto yaw_pose = [](const Vec3& p, double yaw) {
    RigidTransform pose;
    pose.rotation = exp_rotvec(Vec3(0.0, 0.0, yaw));
    pose.translation = p;
    return pose;
  };
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (i > 0 && std::abs(bearings[i] - bearings[i - 1]) > 1e-12) {
      waypoints.push_back(yaw_pose(positions[i], bearings[i - 1]));
    }
    waypoints.push_back(yaw_pose(positions[i], bearings[i]));
  }
  return waypoints;
}

std::vector<RigidTransform> default_waypoints(const WorldSpec& spec) {
  std::vector<Vec3> positions;
  switch (spec.kind) {
    case WorldKind::Tunnel: {
      const double margin = 5.0;
      positions = {Vec3(margin, 0.0, 1.0),
                   Vec3(spec.tunnel_length - margin, 0.0, 1.0)};
      break;
    }
    case WorldKind::CylinderRoom: {
      const double reach = spec.cylinder_radius - 2.0;
      const double h = 1.2;
      positions = {Vec3(-reach, 0.0, h), Vec3(reach, 0.0, h),
                   Vec3(0.0, reach, h),  Vec3(0.0, -reach, h),
                   Vec3(-reach, 0.0, h)};
      break;
    }
    case WorldKind::Plane: {
      const double half = 0.25 * std::min(spec.plane_size_x, spec.plane_size_y);
      const double h = 1.5;
      positions = {Vec3(-half, -half, h), Vec3(half, -half, h),
                   Vec3(half, half, h), Vec3(-half, half, h),
                   Vec3(-half, -half, h)};
      break;
    }
    case WorldKind::CombinedCorridorOpen: {
      const double open_center = spec.corridor_length + spec.open_radius;
      positions = {Vec3(2.0, 0.0, 1.0),
                   Vec3(spec.corridor_length - 2.0, 0.0, 1.0),
                   Vec3(open_center, 0.0, 1.0),
                   Vec3(spec.corridor_length - 2.0, 0.0, 1.0),
                   Vec3(2.0, 0.0, 1.0)};
      break;
    }
    case WorldKind::BoxRoom: {
      const double hx = 0.5 * spec.box_x - 2.0;
      const double hy = 0.5 * spec.box_y - 2.0;
      const double h = 1.2;
      positions = {Vec3(-hx, -hy, h), Vec3(hx, -hy, h), Vec3(hx, hy, h),
                   Vec3(-hx, hy, h), Vec3(-hx, -hy, h)};
      break;
    }
  }

  const double yaw = world_yaw_offset(spec.kind);
  if (yaw != 0.0) {
    const Mat3 r = exp_rotvec(Vec3(0.0, 0.0, yaw));
    for (Vec3& p : positions) {
      p = r * p;
    }
  }
  return face_forward_waypoints(positions);
}

ExperimentConfig experiment_from_config(const ConfigMap& config) {
  ExperimentConfig exp;

  exp.world.kind =
      world_kind_from_string(config.get_string("world", "kind", "box"));
  exp.world.tunnel_radius =
      config.get_double("world", "tunnel_radius", exp.world.tunnel_radius);
  exp.world.tunnel_length =
      config.get_double("world", "tunnel_length", exp.world.tunnel_length);
  exp.world.cylinder_radius =
      config.get_double("world", "cylinder_radius", exp.world.cylinder_radius);
  exp.world.cylinder_height =
      config.get_double("world", "cylinder_height", exp.world.cylinder_height);
  exp.world.plane_size_x =
      config.get_double("world", "plane_size_x", exp.world.plane_size_x);
  exp.world.plane_size_y =
      config.get_double("world", "plane_size_y", exp.world.plane_size_y);
  exp.world.corridor_width =
      config.get_double("world", "corridor_width", exp.world.corridor_width);
  exp.world.corridor_length =
      config.get_double("world", "corridor_length", exp.world.corridor_length);
  exp.world.corridor_wall_height = config.get_double(
      "world", "corridor_wall_height", exp.world.corridor_wall_height);
  exp.world.open_radius =
      config.get_double("world", "open_radius", exp.world.open_radius);
  exp.world.box_x = config.get_double("world", "box_x", exp.world.box_x);
  exp.world.box_y = config.get_double("world", "box_y", exp.world.box_y);
  exp.world.box_z = config.get_double("world", "box_z", exp.world.box_z);
  exp.world.surface_point_spacing = config.get_double(
      "world", "spacing", exp.world.surface_point_spacing);

  exp.trajectory.linear_speed =
      config.get_double("trajectory", "linear_speed", 0.5);
  exp.trajectory.angular_speed =
      config.get_double("trajectory", "angular_speed", 0.2);
  exp.trajectory.scan_rate = config.get_double("trajectory", "scan_rate", 2.0);
  const auto waypoint_lines = config.get_all("trajectory", "waypoint");
  if (waypoint_lines.empty()) {
    exp.trajectory.waypoints = default_waypoints(exp.world);
  } else {
    std::vector<Vec3> positions;
    std::vector<double> yaws;
    bool explicit_yaw = false;
    for (const std::string& line : waypoint_lines) {
      std::istringstream stream(line);
      double x = 0.0, y = 0.0, z = 0.0, yaw_deg = 0.0;
      if (!(stream >> x >> y >> z)) {
        throw ConfigError("bad waypoint '" + line + "'");
      }
      positions.emplace_back(x, y, z);
      if (stream >> yaw_deg) {
        explicit_yaw = true;
      }
      yaws.push_back(yaw_deg);
    }
    if (explicit_yaw) {
      if (yaws.size() != positions.size()) {
        throw ConfigError("waypoints must all carry a yaw or none");
      }
      for (std::size_t i = 0; i < positions.size(); ++i) {
        RigidTransform pose;
        pose.rotation = exp_rotvec(Vec3(0.0, 0.0, yaws[i] * kDegToRad));
        pose.translation = positions[i];
        exp.trajectory.waypoints.push_back(pose);
      }
    } else {
      exp.trajectory.waypoints = face_forward_waypoints(positions);
    }
  }

  exp.noise.sigma_t_per_speed = config.get_double(
      "noise", "sigma_t_per_speed", exp.noise.sigma_t_per_speed);
  exp.noise.sigma_r_per_speed = config.get_double(
      "noise", "sigma_r_per_speed", exp.noise.sigma_r_per_speed);
  exp.noise.range_noise =
      config.get_double("noise", "range_noise", exp.noise.range_noise);

  exp.icp.max_iterations =
      config.get_int("icp", "max_iterations", exp.icp.max_iterations);
  exp.icp.trans_tol = config.get_double("icp", "trans_tol", exp.icp.trans_tol);
  exp.icp.rot_tol = config.get_double("icp", "rot_tol", exp.icp.rot_tol);
  exp.icp.max_match_dist =
      config.get_double("icp", "max_match_dist", exp.icp.max_match_dist);
  exp.icp.degeneracy_handler =
      handler_from_string(config.get_string("icp", "handler", "none"));

  LocalizabilityParams& loc = exp.icp.localizability;
  loc.kappa1 = config.get_double("localizability", "kappa1", loc.kappa1);
  loc.kappa2 = config.get_double("localizability", "kappa2", loc.kappa2);
  loc.kappa3 = config.get_double("localizability", "kappa3", loc.kappa3);
  loc.kappa_f = config.get_double("localizability", "kappa_f", loc.kappa_f);
  loc.torque_eps =
      config.get_double("localizability", "torque_eps", loc.torque_eps);

  RemappingConfig& remap = exp.icp.remapping;
  remap.eigenvalue_threshold = config.get_double(
      "baseline", "eigenvalue_threshold", remap.eigenvalue_threshold);
  remap.condition_ratio =
      config.get_double("baseline", "condition_ratio", remap.condition_ratio);

  exp.map_voxel = config.get_double("run", "map_voxel", exp.map_voxel);
  exp.max_range = config.get_double("run", "max_range", exp.max_range);
  exp.scan_max_points =
      config.get_int("run", "scan_max_points", exp.scan_max_points);
  exp.seed = static_cast<std::uint64_t>(config.get_int("run", "seed", 0));
  exp.output_dir = config.get_string("run", "output_dir", "runs/out");

  exp.world.seed = exp.seed;
  exp.noise.seed = exp.seed;
  return exp;
}

ExperimentConfig load_experiment(const std::filesystem::path& config_path) {
  return experiment_from_config(parse_config_file(config_path));
}

namespace {

/// Occupancy grid keyed by quantized coordinates; 21 bits per axis.
class VoxelGrid {
 public:
  explicit VoxelGrid(double voxel) : voxel_(voxel) {}

  bool try_insert(const Vec3& p) {
    const std::uint64_t key = key_of(p);
    return occupied_.insert(key).second;
  }

 private:
  std::uint64_t key_of(const Vec3& p) const {
    std::uint64_t key = 0;
    for (int i = 0; i < 3; ++i) {
      const auto q =
          static_cast<std::int64_t>(std::floor(p[i] / voxel_)) + (1 << 20);
      key = (key << 21) | static_cast<std::uint64_t>(q & 0x1fffff);
    }
    return key;
  }

  double voxel_;
  std::unordered_set<std::uint64_t> occupied_;
};

void insert_scan(PointCloud& map, VoxelGrid& grid, const PointCloud& scan,
                 const RigidTransform& pose) {
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const Vec3 p = pose.rotation * scan.points[i] + pose.translation;
    if (grid.try_insert(p)) {
      map.points.push_back(p);
      map.normals.push_back(pose.rotation * scan.normals[i]);
    }
  }
}

}  // namespace

RegistrationRun run_registration(const ExperimentConfig& config,
                                 DegeneracyHandler handler) {
  const auto start = std::chrono::steady_clock::now();

  const PointCloud world = build_world(config.world);
  const std::vector<StampedPose> trajectory =
      sample_trajectory(config.trajectory);

  IcpConfig icp_cfg = config.icp;
  icp_cfg.degeneracy_handler = handler;

  RegistrationRun run;
  run.map.frame = "M";
  VoxelGrid grid(config.map_voxel);

  RigidTransform estimate;
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const StampedPose& stamped = trajectory[k];
    const PointCloud scan =
        simulate_scan(world, stamped.pose, config.max_range, config.noise,
                      config.scan_max_points, seed_mix(config.seed, k, 1));

    FrameResult frame;
    frame.frame = static_cast<int>(k);
    frame.t = stamped.t;
    frame.gt_pose = stamped.pose;

    if (k == 0) {
      // The first scan seeds the map at the prior pose.
      frame.prior_pose = stamped.pose;
      frame.estimated_pose = stamped.pose;
      estimate = stamped.pose;
    } else {
      const RigidTransform true_delta =
          compose(inverse(trajectory[k - 1].pose), stamped.pose);
      const double rate = config.trajectory.scan_rate;
      const double linear_speed = true_delta.translation.norm() * rate;
      const double angular_speed = log_rotmat(true_delta.rotation).norm() * rate;
      const RigidTransform prior = compose(
          estimate, perturb_prior(true_delta, linear_speed, angular_speed,
                                  config.noise, seed_mix(config.seed, k, 2)));
      frame.prior_pose = prior;
      try {
        IcpResult result = run_icp(scan, run.map, prior, icp_cfg);
        frame.registered = true;
        frame.converged = result.converged;
        frame.iterations = result.iterations;
        frame.final_cost = result.final_cost;
        frame.estimated_pose = result.pose;
        estimate = result.pose;
        run.max_constraint_violation = std::max(
            run.max_constraint_violation, result.max_constraint_violation);
        for (std::size_t it = 0; it < result.per_iteration_reports.size();
             ++it) {
          run.loc_rows.push_back(to_csv_row(result.per_iteration_reports[it],
                                            static_cast<int>(k),
                                            static_cast<int>(it)));
        }
        if (!result.per_iteration_reports.empty()) {
          frame.has_eta = true;
          frame.first_eta = result.per_iteration_reports.front().eta;
        }
        frame.constraints = std::move(result.per_iteration_constraints);
      } catch (const Error&) {
        // Fall back to the prior; the frame is flagged in the log.
        frame.estimated_pose = prior;
        estimate = prior;
      }
    }

    insert_scan(run.map, grid, scan, frame.estimated_pose);
    run.estimated.poses.push_back({stamped.t, frame.estimated_pose});
    run.ground_truth.poses.push_back({stamped.t, stamped.pose});
    run.frames.push_back(std::move(frame));
  }

  run.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return run;
}

void cmd_simulate(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  const PointCloud world = build_world(config.world);
  write_ply(config.output_dir / "world.ply", world);

  const std::vector<StampedPose> trajectory =
      sample_trajectory(config.trajectory);
  Trajectory gt;
  gt.poses = trajectory;
  write_trajectory_csv(config.output_dir / "trajectory_gt.csv", gt);

  const std::filesystem::path scan_dir = config.output_dir / "scans";
  std::filesystem::create_directories(scan_dir);
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const PointCloud scan =
        simulate_scan(world, trajectory[k].pose, config.max_range, config.noise,
                      config.scan_max_points, seed_mix(config.seed, k, 1));
    char name[32];
    std::snprintf(name, sizeof(name), "scan_%06zu.ply", k);
    write_ply(scan_dir / name, scan);
  }
}

void cmd_register(const ExperimentConfig& config, DegeneracyHandler handler) {
  const RegistrationRun run = run_registration(config, handler);

  std::filesystem::create_directories(config.output_dir);
  {
    std::ofstream meta(config.output_dir / "run.meta");
    meta << "handler = " << to_string(handler) << "\n";
    meta << "world = " << to_string(config.world.kind) << "\n";
    meta << "seed = " << config.seed << "\n";
    meta << "frames = " << run.frames.size() << "\n";
    meta << "map_voxel = " << format_double(config.map_voxel) << "\n";
    meta << "scan_rate = " << format_double(config.trajectory.scan_rate)
         << "\n";
  }
  write_trajectory_csv(config.output_dir / "trajectory_est.csv",
                       run.estimated);
  write_trajectory_csv(config.output_dir / "trajectory_gt.csv",
                       run.ground_truth);
  write_localizability_csv(config.output_dir / "localizability.csv",
                           run.loc_rows);
  write_ply(config.output_dir / "map.ply", run.map);

  std::ofstream log(config.output_dir / "register_log.csv");
  log << "frame,t,registered,converged,iterations,final_cost\n";
  for (const FrameResult& frame : run.frames) {
    log << frame.frame << ',' << format_double(frame.t) << ','
        << (frame.registered ? 1 : 0) << ',' << (frame.converged ? 1 : 0)
        << ',' << frame.iterations << ',' << format_double(frame.final_cost)
        << '\n';
  }
}

namespace {

std::string meta_value(const std::filesystem::path& run_dir,
                       const std::string& key) {
  const auto meta_path = run_dir / "run.meta";
  if (!std::filesystem::exists(meta_path)) {
    return "";
  }
  const ConfigMap meta = parse_config_file(meta_path);
  return meta.get_string("", key, "");
}

constexpr const char* kMetricsHeader =
    "run,handler,"
    "ape_prefix15_trans_mean,ape_prefix15_trans_std,"
    "ape_prefix15_rot_mean_deg,ape_prefix15_rot_std_deg,"
    "ape_origin_trans_mean,ape_origin_trans_std,"
    "ape_origin_rot_mean_deg,ape_origin_rot_std_deg,"
    "ape_last_position_error,"
    "rpe10_trans_mean,rpe10_trans_std,rpe10_rot_mean_deg,rpe10_rot_std_deg,"
    "map_error_mean,map_error_rmse";

}  // namespace

void cmd_evaluate(const std::filesystem::path& run_dir,
                  const std::filesystem::path& truth_dir) {
  const Trajectory estimate =
      read_trajectory_csv(run_dir / "trajectory_est.csv");
  const std::filesystem::path gt_path =
      std::filesystem::exists(truth_dir / "trajectory_gt.csv")
          ? truth_dir / "trajectory_gt.csv"
          : run_dir / "trajectory_gt.csv";
  const Trajectory reference = read_trajectory_csv(gt_path);

  const ApeResult ape_prefix =
      ape(estimate, reference, ApeAlignment::PrefixMeters, 15.0);
  const ApeResult ape_origin = ape(estimate, reference, ApeAlignment::Origin);

  RpeResult rpe;
  bool has_rpe = false;
  try {
    rpe = rpe_per_distance(estimate, reference, 10.0);
    has_rpe = true;
  } catch (const EmptyAssociation&) {
    // Trajectory shorter than one segment; columns stay 0.
  }

  MapErrorResult map_error;
  bool has_map_error = false;
  const auto world_path = truth_dir / "world.ply";
  const auto map_path = run_dir / "map.ply";
  if (std::filesystem::exists(world_path) &&
      std::filesystem::exists(map_path)) {
    const PointCloud truth = read_ply(world_path);
    const PointCloud built = read_ply(map_path);
    map_error = map_p2p_error(built, truth);
    has_map_error = true;

    std::ofstream per_point(run_dir / "map_error.csv");
    per_point << "index,distance\n";
    for (std::size_t i = 0; i < map_error.per_point.size(); ++i) {
      per_point << i << ',' << format_double(map_error.per_point[i]) << '\n';
    }
  }

  std::ofstream out(run_dir / "metrics.csv");
  out << kMetricsHeader << '\n';
  out << run_dir.filename().string() << ',' << meta_value(run_dir, "handler");
  for (double v :
       {ape_prefix.trans_mean, ape_prefix.trans_std, ape_prefix.rot_mean_deg,
        ape_prefix.rot_std_deg, ape_origin.trans_mean, ape_origin.trans_std,
        ape_origin.rot_mean_deg, ape_origin.rot_std_deg,
        ape_origin.last_position_error}) {
    out << ',' << format_double(v);
  }
  for (double v : {has_rpe ? rpe.trans_mean : 0.0,
                   has_rpe ? rpe.trans_std : 0.0,
                   has_rpe ? rpe.rot_mean_deg : 0.0,
                   has_rpe ? rpe.rot_std_deg : 0.0}) {
    out << ',' << format_double(v);
  }
  for (double v : {has_map_error ? map_error.mean : 0.0,
                   has_map_error ? map_error.rmse : 0.0}) {
    out << ',' << format_double(v);
  }
  out << '\n';
}

void cmd_compare(const std::vector<std::filesystem::path>& run_dirs,
                 const std::filesystem::path& out_file) {
  std::ofstream out(out_file);
  if (!out) {
    throw IoError("cannot write " + out_file.string());
  }
  out << kMetricsHeader << '\n';
  for (const auto& dir : run_dirs) {
    std::ifstream in(dir / "metrics.csv");
    if (!in) {
      throw IoError("no metrics.csv in " + dir.string() +
                    " (run 'evaluate' first)");
    }
    std::string line;
    std::getline(in, line);
    if (line != kMetricsHeader) {
      throw IoError(dir.string() + ": unexpected metrics header");
    }
    while (std::getline(in, line)) {
      if (!line.empty()) {
        out << line << '\n';
      }
    }
  }
}

}  // namespace xicp
