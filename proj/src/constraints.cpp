#include "xicp/constraints.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "xicp/error.hpp"

namespace xicp {

Eigen::MatrixXd ConstraintSet::matrix() const {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(size()), 6);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].subspace == ConstraintSubspace::Rotation) {
      c.block<1, 3>(static_cast<Eigen::Index>(i), 0) =
          rows[i].direction.transpose();
    } else {
      c.block<1, 3>(static_cast<Eigen::Index>(i), 3) =
          rows[i].direction.transpose();
    }
  }
  return c;
}

Eigen::VectorXd ConstraintSet::rhs() const {
  Eigen::VectorXd d(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d[static_cast<Eigen::Index>(i)] = rows[i].value;
  }
  return d;
}

CorrespondenceSet resample_pairs(const CorrespondenceSet& matches,
                                 const ContributionTables& tables,
                                 int direction_index, DecisionBranch branch) {
  if (direction_index < 0 || direction_index >= 6) {
    throw Error("resample_pairs: direction index out of range");
  }
  const bool use_strong = branch == DecisionBranch::PartialStrong ||
                          branch == DecisionBranch::FullStrong;
  const auto& table = use_strong ? tables.strong : tables.filtered;

  std::vector<std::pair<double, int>> selected;
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    const double value = table(i, direction_index);
    if (value > 0.0) {
      selected.emplace_back(value, static_cast<int>(i));
    }
  }
  if (selected.empty()) {
    throw EmptySelection("resample_pairs: no contributing pairs on direction " +
                         std::to_string(direction_index));
  }
  std::sort(selected.begin(), selected.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });

  CorrespondenceSet out;
  out.frame = matches.frame;
  out.pairs.reserve(selected.size());
  for (const auto& [value, index] : selected) {
    out.pairs.push_back(matches.pairs[index]);
  }
  return out;
}

namespace {

/// Pivoted-LU solve of the symmetric 3x3 normal system A x = b with Jacobi
/// scaling and conditional Tikhonov regularization.
Vec3 solve_normal_system(const Mat3& a, const Vec3& b) {
  Vec3 scale;
  for (int i = 0; i < 3; ++i) {
    scale[i] = a(i, i) > 0.0 ? 1.0 / std::sqrt(a(i, i)) : 1.0;
  }
  const Mat3 d = scale.asDiagonal();
  Mat3 scaled = d * a * d;
  const Vec3 scaled_b = d * b;

  auto condition_of = [](const Mat3& m) {
    Eigen::SelfAdjointEigenSolver<Mat3> eig(m);
    const double lo = eig.eigenvalues()[0];
    const double hi = eig.eigenvalues()[2];
    if (lo <= 0.0 || hi <= 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    return hi / lo;
  };

  if (condition_of(scaled) > 1e8) {
    const double lambda = 1e-6 * scaled.trace() / 3.0;
    scaled += lambda * Mat3::Identity();
    if (condition_of(scaled) > 1e12) {
      throw IllConditioned(
          "solve_partial_constraint: system remains ill-conditioned after "
          "regularization");
    }
  }

  const Vec3 x = Eigen::FullPivLU<Mat3>(scaled).solve(scaled_b);
  return d * x;
}

}  // namespace

Vec3 solve_partial_constraint(const CorrespondenceSet& selected,
                              ConstraintSubspace subspace) {
  if (selected.size() < 3) {
    throw IllConditioned("solve_partial_constraint: need at least 3 pairs");
  }
  Mat3 a = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  for (const Correspondence& c : selected.pairs) {
    const Vec3 row = subspace == ConstraintSubspace::Translation
                         ? c.n
                         : Vec3(c.p.cross(c.n));
    a += row * row.transpose();
    b += row * c.n.dot(c.q - c.p);
  }
  return solve_normal_system(a, b);
}

ConstraintSet build_constraints(const LocalizabilityReport& report,
                                const CorrespondenceSet& matches,
                                const Mat3& r_map_lidar) {
  ConstraintSet constraints;
  // Rotation rows first (columns 0..2), then translation (columns 3..5).
  for (int j = 0; j < 6; ++j) {
    if (report.eta[j] == Localizability::Full) {
      continue;
    }
    const bool rotational = j < 3;
    const Vec3 eigvec =
        rotational ? report.basis.v_r.col(j) : report.basis.v_t.col(j - 3);
    ConstraintRow row;
    row.direction = r_map_lidar * eigvec;
    row.subspace = rotational ? ConstraintSubspace::Rotation
                              : ConstraintSubspace::Translation;
    row.value = 0.0;

    if (report.eta[j] == Localizability::Partial) {
      try {
        const CorrespondenceSet selected = resample_pairs(
            matches, report.tables, j, report.triggering_branch[j]);
        const Vec3 estimate = solve_partial_constraint(
            selected, rotational ? ConstraintSubspace::Rotation
                                 : ConstraintSubspace::Translation);
        row.value = row.direction.dot(estimate);
      } catch (const EmptySelection&) {
        // Inconsistent tables; fall back to holding the prior.
      } catch (const IllConditioned&) {
        // Unreliable re-sampled estimate; fall back to holding the prior.
      }
    }
    constraints.rows.push_back(row);
  }
  return constraints;
}

KktSolution solve_kkt(const LinearizedProblem& problem,
                      const ConstraintSet& constraints) {
  const auto c = static_cast<Eigen::Index>(constraints.size());
  Eigen::MatrixXd augmented = Eigen::MatrixXd::Zero(6 + c, 6 + c);
  Eigen::VectorXd rhs(6 + c);
  augmented.topLeftCorner<6, 6>() = 2.0 * problem.hessian;
  rhs.head<6>() = 2.0 * problem.rhs;
  if (c > 0) {
    const Eigen::MatrixXd cm = constraints.matrix();
    augmented.block(6, 0, c, 6) = cm;
    augmented.block(0, 6, 6, c) = cm.transpose();
    rhs.tail(c) = constraints.rhs();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      augmented, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  if (svd.rank() < 6 + c) {
    const Eigen::VectorXd& sv = svd.singularValues();
    throw SingularKkt(
        "solve_kkt: augmented system rank " + std::to_string(svd.rank()) +
        " of " + std::to_string(6 + c) +
        "; a degenerate direction is unconstrained (smallest singular value " +
        std::to_string(sv[sv.size() - 1]) + ")");
  }
  const Eigen::VectorXd solution = svd.solve(rhs);

  KktSolution out;
  out.update = PoseUpdate::from_stacked(solution.head<6>());
  out.multipliers = solution.tail(c);
  return out;
}

}  // namespace xicp
