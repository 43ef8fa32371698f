#include "xicp/baselines.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace xicp {

RemapResult solution_remap(const LinearizedProblem& problem,
                           const RemappingConfig& cfg) {
  Eigen::SelfAdjointEigenSolver<Mat6> eig(problem.hessian);
  const Vec6 eigenvalues = eig.eigenvalues();  // ascending
  const Mat6 eigenvectors = eig.eigenvectors();

  RemapResult result;
  result.eigenvalues = eigenvalues;
  const double lambda_max = eigenvalues[5];
  bool any_degenerate = false;
  for (int i = 0; i < 6; ++i) {
    const bool degenerate =
        cfg.mode == RemappingMode::FixedThreshold
            ? eigenvalues[i] < cfg.eigenvalue_threshold
            : (eigenvalues[i] <= 0.0 ||
               lambda_max / eigenvalues[i] > cfg.condition_ratio);
    result.degenerate_mask[i] = degenerate;
    any_degenerate |= degenerate;
  }

  const PoseUpdate unconstrained = solve_unconstrained(problem);
  if (!any_degenerate) {
    result.update = unconstrained;
    return result;
  }

  Mat6 keep = Mat6::Zero();
  for (int i = 0; i < 6; ++i) {
    if (!result.degenerate_mask[i]) {
      keep(i, i) = 1.0;
    }
  }
  const Vec6 remapped =
      eigenvectors * keep * eigenvectors.transpose() * unconstrained.stacked();
  result.update = PoseUpdate::from_stacked(remapped);
  return result;
}

LocalizabilityReport remap_report(const RemapResult& result) {
  LocalizabilityReport report;
  report.basis.sigma_r = result.eigenvalues.head<3>();
  report.basis.sigma_t = result.eigenvalues.tail<3>();
  const auto n = static_cast<Eigen::Index>(0);
  report.tables.raw.setZero(n, 6);
  report.tables.filtered.setZero(n, 6);
  report.tables.strong.setZero(n, 6);
  for (int i = 0; i < 6; ++i) {
    report.eta[i] = result.degenerate_mask[i] ? Localizability::None
                                              : Localizability::Full;
    report.triggering_branch[i] = DecisionBranch::NoBranch;
  }
  return report;
}

}  // namespace xicp
