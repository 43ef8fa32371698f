#pragma once

#include <Eigen/Core>
#include <vector>

#include "xicp/correspondence.hpp"
#include "xicp/geometry.hpp"
#include "xicp/localizability.hpp"
#include "xicp/problem.hpp"

namespace xicp {

enum class ConstraintSubspace { Rotation, Translation };

/// One equality constraint on the 6-DoF update: direction . r = value for
/// rotation rows, direction . t = value for translation rows. Directions are
/// unit eigenvectors expressed in the optimization frame.
struct ConstraintRow {
  Vec3 direction = Vec3::Zero();
  ConstraintSubspace subspace = ConstraintSubspace::Translation;
  double value = 0.0;
};

/// Stacked constraints C x = d; rotation rows precede translation rows.
struct ConstraintSet {
  std::vector<ConstraintRow> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  Eigen::MatrixXd matrix() const;  // C, size c x 6
  Eigen::VectorXd rhs() const;     // d, size c
};

/// Pairs backing a partial direction, selected by contribution. The combined
/// branch keeps every pair with a non-zero filtered entry for that column,
/// the strong branch every pair with a non-zero strong entry. Ordered by
/// contribution descending, ties by ascending pair index. Throws
/// EmptySelection when nothing qualifies.
CorrespondenceSet resample_pairs(const CorrespondenceSet& matches,
                                 const ContributionTables& tables,
                                 int direction_index, DecisionBranch branch);

/// Constraint value for a partial direction from the re-sampled pairs:
/// solves the 3x3 normal system built from n rows (translation) or p x n
/// rows (rotation) with pivoted LU after Jacobi scaling; Tikhonov
/// regularization is added when the scaled system's condition estimate
/// exceeds 1e8. Throws IllConditioned past 1e12.
Vec3 solve_partial_constraint(const CorrespondenceSet& selected,
                              ConstraintSubspace subspace);

/// Assembles the constraint set for the current iteration: nothing for full
/// directions, value 0 for none, re-sampled estimates for partial. Matches
/// must be expressed in the optimization frame; eigenvectors are rotated into
/// it by r_map_lidar. Partial directions whose re-sampled solve fails (too
/// few pairs or ill-conditioned) are demoted to a zero-value constraint.
ConstraintSet build_constraints(const LocalizabilityReport& report,
                                const CorrespondenceSet& matches,
                                const Mat3& r_map_lidar);

struct KktSolution {
  PoseUpdate update;
  Eigen::VectorXd multipliers;
};

/// Solves the Lagrangian-augmented system
///   [ 2 J^T J  C^T ] [x]   [ 2 J^T r ]
///   [ C        0   ] [l] = [ d       ]
/// via SVD pseudo-inverse. Throws SingularKkt when the augmented matrix is
/// numerically rank deficient, i.e. a degenerate direction was left
/// unconstrained.
KktSolution solve_kkt(const LinearizedProblem& problem,
                      const ConstraintSet& constraints);

}  // namespace xicp
