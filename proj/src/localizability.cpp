#include "xicp/localizability.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "xicp/error.hpp"

namespace xicp {

const char* to_string(Localizability category) {
  switch (category) {
    case Localizability::None:
      return "none";
    case Localizability::Partial:
      return "partial";
    case Localizability::Full:
      return "full";
  }
  return "?";
}

int LocalizabilityReport::count_non_full(int first_column,
                                         int last_column) const {
  int count = 0;
  for (int j = first_column; j <= last_column; ++j) {
    if (eta[j] != Localizability::Full) {
      ++count;
    }
  }
  return count;
}

namespace {

void sign_normalize(Mat3& vectors) {
  for (int c = 0; c < 3; ++c) {
    int major = 0;
    double best = std::abs(vectors(0, c));
    for (int r = 1; r < 3; ++r) {
      if (std::abs(vectors(r, c)) > best) {
        best = std::abs(vectors(r, c));
        major = r;
      }
    }
    if (vectors(major, c) < 0.0) {
      vectors.col(c) = -vectors.col(c);
    }
  }
}

}  // namespace

EigenBasis eigen_analyze(const LinearizedProblem& problem) {
  EigenBasis basis;
  basis.frame = problem.frame;

  Eigen::SelfAdjointEigenSolver<Mat3> eig_t(problem.hessian_tt());
  Eigen::SelfAdjointEigenSolver<Mat3> eig_r(problem.hessian_rr());
  basis.sigma_t = eig_t.eigenvalues();  // ascending
  basis.sigma_r = eig_r.eigenvalues();
  basis.v_t = eig_t.eigenvectors();
  basis.v_r = eig_r.eigenvectors();
  sign_normalize(basis.v_t);
  sign_normalize(basis.v_r);
  return basis;
}

ContributionTables compute_contributions(const CorrespondenceSet& matches,
                                         const EigenBasis& basis,
                                         const LocalizabilityParams& params,
                                         Exec exec) {
  if (matches.frame != basis.frame) {
    throw FrameMismatch("compute_contributions: matches in '" + matches.frame +
                        "' but basis in '" + basis.frame + "'");
  }

  const auto n = static_cast<Eigen::Index>(matches.size());
  ContributionTables tables;
  tables.raw.setZero(n, 6);
  tables.filtered.setZero(n, 6);
  tables.strong.setZero(n, 6);
  std::vector<std::uint8_t> dropped(matches.size(), 0);

  parallel_for(
      static_cast<std::ptrdiff_t>(n),
      [&](std::ptrdiff_t i) {
        const Correspondence& c = matches.pairs[i];
        const Vec3 torque = c.p.cross(c.n);
        const double torque_norm = torque.norm();

        Vec3 rot_row = Vec3::Zero();
        if (torque_norm < params.torque_eps) {
          dropped[i] = 1;
        } else if (torque_norm >= 1.0) {
          // Moment normalization: map the torque onto the unit sphere so the
          // lever arm length cannot inflate the contribution.
          rot_row = (basis.v_r.transpose() * (torque / torque_norm)).cwiseAbs();
        } else {
          // Sub-unit torques stay raw; pushing them onto the sphere would
          // overstate the available rotational information.
          rot_row = (basis.v_r.transpose() * torque).cwiseAbs();
        }
        const Vec3 trans_row = (basis.v_t.transpose() * c.n).cwiseAbs();

        for (int j = 0; j < 3; ++j) {
          const double r = std::min(rot_row[j], 1.0);
          const double t = std::min(trans_row[j], 1.0);
          tables.raw(i, j) = r;
          tables.raw(i, 3 + j) = t;
          const double rf = r >= params.kappa_f ? r : 0.0;
          const double tf = t >= params.kappa_f ? t : 0.0;
          tables.filtered(i, j) = rf;
          tables.filtered(i, 3 + j) = tf;
          tables.strong(i, j) = rf >= params.strong_cut ? rf : 0.0;
          tables.strong(i, 3 + j) = tf >= params.strong_cut ? tf : 0.0;
        }
      },
      exec);

  // Fixed index order keeps the sums independent of the execution policy.
  for (Eigen::Index i = 0; i < n; ++i) {
    tables.l_combined += tables.filtered.row(i).transpose();
    tables.l_strong += tables.strong.row(i).transpose();
    if (dropped[i]) {
      tables.dropped_pairs.push_back(static_cast<int>(i));
    }
  }
  return tables;
}

namespace {

LocalizabilityReport make_report(const EigenBasis& basis,
                                 ContributionTables tables) {
  LocalizabilityReport report;
  report.basis = basis;
  report.tables = std::move(tables);
  return report;
}

}  // namespace

LocalizabilityReport categorize(const EigenBasis& basis,
                                ContributionTables tables,
                                const LocalizabilityParams& params) {
  LocalizabilityReport report = make_report(basis, std::move(tables));
  for (int j = 0; j < 6; ++j) {
    const double lc = report.tables.l_combined[j];
    const double ls = report.tables.l_strong[j];
    if (lc >= params.kappa1) {
      report.eta[j] = Localizability::Full;
      report.triggering_branch[j] = DecisionBranch::FullCombined;
    } else if (ls >= params.kappa2) {
      report.eta[j] = Localizability::Full;
      report.triggering_branch[j] = DecisionBranch::FullStrong;
    } else if (lc >= params.kappa2) {
      // When both partial comparisons hold, the combined pair set is the one
      // re-used by the constraint calculation.
      report.eta[j] = Localizability::Partial;
      report.triggering_branch[j] = DecisionBranch::PartialCombined;
    } else if (ls >= params.kappa3) {
      report.eta[j] = Localizability::Partial;
      report.triggering_branch[j] = DecisionBranch::PartialStrong;
    } else {
      report.eta[j] = Localizability::None;
      report.triggering_branch[j] = DecisionBranch::NoBranch;
    }
  }
  return report;
}

LocalizabilityReport categorize_binary(const EigenBasis& basis,
                                       ContributionTables tables,
                                       const LocalizabilityParams& params) {
  LocalizabilityReport report = make_report(basis, std::move(tables));
  for (int j = 0; j < 6; ++j) {
    const double lc = report.tables.l_combined[j];
    const double ls = report.tables.l_strong[j];
    if (lc >= params.kappa1) {
      report.eta[j] = Localizability::Full;
      report.triggering_branch[j] = DecisionBranch::FullCombined;
    } else if (ls >= params.kappa3) {
      report.eta[j] = Localizability::Full;
      report.triggering_branch[j] = DecisionBranch::FullStrong;
    } else {
      report.eta[j] = Localizability::None;
      report.triggering_branch[j] = DecisionBranch::NoBranch;
    }
  }
  return report;
}

}  // namespace xicp
