#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "xicp/icp.hpp"
#include "xicp/io.hpp"
#include "xicp/metrics.hpp"
#include "xicp/simulator.hpp"

namespace xicp {

/// Everything one experiment needs: world, trajectory, noise, registration
/// settings, and output layout.
struct ExperimentConfig {
  WorldSpec world;
  TrajectorySpec trajectory;
  NoiseSpec noise;
  IcpConfig icp;
  double map_voxel = 0.1;
  double max_range = 15.0;
  int scan_max_points = 8192;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "runs/out";
};

DegeneracyHandler handler_from_string(const std::string& name);
const char* to_string(DegeneracyHandler handler);

/// Canned waypoint path for a world kind (used when the config gives none).
std::vector<RigidTransform> default_waypoints(const WorldSpec& spec);

/// Waypoints from positions, each oriented to face its outgoing segment.
std::vector<RigidTransform> face_forward_waypoints(
    const std::vector<Vec3>& positions);

ExperimentConfig experiment_from_config(const ConfigMap& config);
ExperimentConfig load_experiment(const std::filesystem::path& config_path);

struct FrameResult {
  int frame = 0;
  double t = 0.0;
  RigidTransform gt_pose;
  RigidTransform prior_pose;
  RigidTransform estimated_pose;
  bool registered = false;  // false: fell back to the prior
  bool converged = false;
  int iterations = 0;
  double final_cost = 0.0;
  /// First-iteration localizability categories (detector handlers only).
  bool has_eta = false;
  std::array<Localizability, 6> first_eta{};
  /// Map-frame constraint rows per iteration (XICP handlers only).
  std::vector<ConstraintSet> constraints;
};

struct RegistrationRun {
  std::vector<FrameResult> frames;
  std::vector<LocalizabilityCsvRow> loc_rows;
  Trajectory estimated;
  Trajectory ground_truth;
  PointCloud map;
  double max_constraint_violation = 0.0;
  double wall_time_seconds = 0.0;
};

/// Scan-to-map registration over the configured trajectory: the first scan
/// seeds the map at the prior pose, later scans register against the
/// accumulated voxel-downsampled map using a velocity-noise-perturbed
/// odometry prior. A frame whose registration throws falls back to its prior
/// and is flagged.
RegistrationRun run_registration(const ExperimentConfig& config,
                                 DegeneracyHandler handler);

/// simulate: world.ply, trajectory_gt.csv, scans/scan_NNNNNN.ply.
void cmd_simulate(const ExperimentConfig& config);

/// register: run.meta, trajectory_est.csv, trajectory_gt.csv,
/// localizability.csv, register_log.csv, map.ply.
void cmd_register(const ExperimentConfig& config, DegeneracyHandler handler);

/// evaluate: metrics.csv and map_error.csv inside run_dir. Ground truth
/// trajectory and world come from truth_dir (falling back to run_dir for the
/// trajectory).
void cmd_evaluate(const std::filesystem::path& run_dir,
                  const std::filesystem::path& truth_dir);

/// compare: joins each run's metrics.csv into one table, methods as rows.
void cmd_compare(const std::vector<std::filesystem::path>& run_dirs,
                 const std::filesystem::path& out_file);

}  // namespace xicp
