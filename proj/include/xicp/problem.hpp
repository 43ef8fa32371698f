#pragma once

#include <Eigen/Core>
#include <string>

#include "xicp/correspondence.hpp"
#include "xicp/geometry.hpp"
#include "xicp/parallel.hpp"

namespace xicp {

/// Point-to-plane least squares around x = 0. Row i of the Jacobian is
/// [(p_i x n_i)^T, n_i^T] (rotation block first), the residual is
/// n_i . (q_i - p_i), and hessian/rhs carry J^T J and J^T r.
struct LinearizedProblem {
  Eigen::Matrix<double, Eigen::Dynamic, 6> jacobian;
  Eigen::VectorXd residuals;
  Mat6 hessian = Mat6::Zero();
  Vec6 rhs = Vec6::Zero();
  std::string frame;

  Eigen::Index size() const { return jacobian.rows(); }
  /// Sub-blocks of the Hessian tied to the rotation / translation variables.
  Mat3 hessian_rr() const { return hessian.topLeftCorner<3, 3>(); }
  Mat3 hessian_tt() const { return hessian.bottomRightCorner<3, 3>(); }
};

/// Builds the stacked problem from matched pairs. Throws TooFewMatches below
/// 6 pairs.
LinearizedProblem linearize(const CorrespondenceSet& matches,
                            Exec exec = default_exec());

/// Minimum-norm least squares solution of J x = r via SVD; singular values
/// below 1e-10 of the largest are truncated, so rank-deficient problems yield
/// the minimum-norm solution instead of failing.
PoseUpdate solve_unconstrained(const LinearizedProblem& problem);

}  // namespace xicp
