#include "xicp/icp.hpp"

#include <cmath>

#include "xicp/error.hpp"
#include "xicp/kdtree.hpp"

namespace xicp {

IcpResult run_icp(const PointCloud& reading, const PointCloud& reference,
                  const RigidTransform& t_init, const IcpConfig& cfg) {
  if (!reference.has_normals()) {
    throw Error("run_icp: reference cloud has no normals");
  }

  const KdTree tree(reference.points);
  RigidTransform t = t_init;
  IcpResult result;

  LocalizabilityParams loc_params = cfg.localizability;
  if (cfg.degeneracy_handler == DegeneracyHandler::XsIcp) {
    loc_params.kappa3 = loc_params.kappa2;  // binary variant: kappa2 == kappa3
  }

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const CorrespondenceSet matches =
        match(reading, reference, tree, t, cfg.max_match_dist);
    const CorrespondenceSet solve_matches = recenter(matches, t.translation);
    const LinearizedProblem problem = linearize(solve_matches);
    result.per_iteration_costs.push_back(problem.residuals.squaredNorm());

    PoseUpdate update;
    switch (cfg.degeneracy_handler) {
      case DegeneracyHandler::None:
        update = solve_unconstrained(problem);
        break;
      case DegeneracyHandler::XIcp:
      case DegeneracyHandler::XsIcp: {
        const CorrespondenceSet lidar_matches = to_lidar_frame(matches, t);
        const LinearizedProblem lidar_problem = linearize(lidar_matches);
        const EigenBasis basis = eigen_analyze(lidar_problem);
        ContributionTables tables =
            compute_contributions(lidar_matches, basis, loc_params);
        LocalizabilityReport report =
            cfg.degeneracy_handler == DegeneracyHandler::XsIcp
                ? categorize_binary(basis, std::move(tables), loc_params)
                : categorize(basis, std::move(tables), loc_params);
        ConstraintSet constraints =
            build_constraints(report, solve_matches, t.rotation);
        if (constraints.empty()) {
          // All directions localizable: the optimization runs nominally.
          update = solve_unconstrained(problem);
        } else {
          const KktSolution solution = solve_kkt(problem, constraints);
          update = solution.update;
          const double violation = (constraints.matrix() * update.stacked() -
                                    constraints.rhs())
                                       .cwiseAbs()
                                       .maxCoeff();
          result.max_constraint_violation =
              std::max(result.max_constraint_violation, violation);
        }
        result.per_iteration_reports.push_back(std::move(report));
        result.per_iteration_constraints.push_back(std::move(constraints));
        break;
      }
      case DegeneracyHandler::SolutionRemapping:
      case DegeneracyHandler::AdaptiveRemapping: {
        RemappingConfig remap_cfg = cfg.remapping;
        remap_cfg.mode =
            cfg.degeneracy_handler == DegeneracyHandler::AdaptiveRemapping
                ? RemappingMode::RelativeCondition
                : RemappingMode::FixedThreshold;
        const RemapResult remap = solution_remap(problem, remap_cfg);
        update = remap.update;
        result.per_iteration_reports.push_back(remap_report(remap));
        break;
      }
    }

    if (!update.stacked().allFinite()) {
      throw NonFiniteUpdate("run_icp: non-finite update at iteration " +
                            std::to_string(iter));
    }

    // Rotation about the current sensor origin, then translation; matches the
    // linearization point of the recentered problem.
    t.rotation = exp_rotvec(update.rotvec) * t.rotation;
    t.translation += update.trans;
    ++result.iterations;
    result.final_cost =
        (problem.jacobian * update.stacked() - problem.residuals).squaredNorm();

    if (update.trans.norm() < cfg.trans_tol &&
        update.rotvec.norm() < cfg.rot_tol) {
      result.converged = true;
      break;
    }
  }

  result.pose = t;
  return result;
}

}  // namespace xicp
