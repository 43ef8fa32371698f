#include "xicp/problem.hpp"

#include <Eigen/Dense>

#include "xicp/error.hpp"

namespace xicp {

LinearizedProblem linearize(const CorrespondenceSet& matches, Exec exec) {
  const auto n = static_cast<Eigen::Index>(matches.size());
  if (n < 6) {
    throw TooFewMatches("linearize: " + std::to_string(n) +
                        " pairs, need at least 6");
  }

  LinearizedProblem problem;
  problem.frame = matches.frame;
  problem.jacobian.resize(n, 6);
  problem.residuals.resize(n);
  parallel_for(
      static_cast<std::ptrdiff_t>(n),
      [&](std::ptrdiff_t i) {
        const Correspondence& c = matches.pairs[i];
        problem.jacobian.block<1, 3>(i, 0) = c.p.cross(c.n).transpose();
        problem.jacobian.block<1, 3>(i, 3) = c.n.transpose();
        problem.residuals[i] = c.n.dot(c.q - c.p);
      },
      exec);

  problem.hessian = problem.jacobian.transpose() * problem.jacobian;
  problem.rhs = problem.jacobian.transpose() * problem.residuals;
  return problem;
}

PoseUpdate solve_unconstrained(const LinearizedProblem& problem) {
  Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 6>> svd(
      problem.jacobian, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  const Vec6 x = svd.solve(problem.residuals);
  return PoseUpdate::from_stacked(x);
}

}  // namespace xicp
