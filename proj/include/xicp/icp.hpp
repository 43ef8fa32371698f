#pragma once

#include <vector>

#include "xicp/baselines.hpp"
#include "xicp/constraints.hpp"
#include "xicp/correspondence.hpp"
#include "xicp/geometry.hpp"
#include "xicp/localizability.hpp"
#include "xicp/problem.hpp"

namespace xicp {

enum class DegeneracyHandler {
  None,
  XIcp,
  XsIcp,
  SolutionRemapping,
  AdaptiveRemapping,
};

struct IcpConfig {
  int max_iterations = 40;
  double trans_tol = 1e-4;       // meters
  double rot_tol = 1e-4;         // radians
  double max_match_dist = 0.5;   // meters
  DegeneracyHandler degeneracy_handler = DegeneracyHandler::None;
  LocalizabilityParams localizability;
  RemappingConfig remapping;
};

struct IcpResult {
  RigidTransform pose;  // T_ML
  int iterations = 0;
  double final_cost = 0.0;
  bool converged = false;
  /// One report per iteration for the detector-backed handlers; empty for
  /// handler None. Remapping handlers store adapted reports (see
  /// remap_report).
  std::vector<LocalizabilityReport> per_iteration_reports;
  /// Map-frame constraint rows used at each iteration (XICP handlers only).
  std::vector<ConstraintSet> per_iteration_constraints;
  /// Residual cost at the start of each iteration (before that update).
  std::vector<double> per_iteration_costs;
  /// Largest ||C x - d||_inf over all constrained solves in this run.
  double max_constraint_violation = 0.0;
};

/// Iterative scan-to-reference registration. Per iteration: match, analyze in
/// the LiDAR frame, solve in a map-aligned frame centered at the current
/// sensor position, and left-compose the update (rotation about the current
/// origin, then translation). Eigenvector directions handed to the
/// constrained solve are rotated into the map frame each iteration.
IcpResult run_icp(const PointCloud& reading, const PointCloud& reference,
                  const RigidTransform& t_init, const IcpConfig& cfg);

}  // namespace xicp
