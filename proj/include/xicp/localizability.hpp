#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "xicp/correspondence.hpp"
#include "xicp/parallel.hpp"
#include "xicp/problem.hpp"

namespace xicp {

enum class Localizability { None, Partial, Full };

/// Which decision-tree comparison fired for a direction. Partial directions
/// carry it forward so re-sampling knows whether to reuse the filtered or the
/// strong pair set.
enum class DecisionBranch {
  FullCombined,    // L_c >= kappa1
  FullStrong,      // L_s >= kappa2
  PartialCombined, // L_c >= kappa2
  PartialStrong,   // L_s >= kappa3
  NoBranch,
};

const char* to_string(Localizability category);

/// Eigen-decompositions of the two 3x3 Hessian sub-blocks. The full 6x6 is
/// never decomposed: rotation and translation live on different scales, and a
/// joint spectrum would entangle them. Eigenvalues ascend; each eigenvector is
/// sign-normalized so its largest-magnitude component (first on ties) is
/// non-negative.
struct EigenBasis {
  Mat3 v_t = Mat3::Identity();
  Mat3 v_r = Mat3::Identity();
  Vec3 sigma_t = Vec3::Zero();
  Vec3 sigma_r = Vec3::Zero();
  std::string frame;
};

/// Per-pair localizability contributions. Columns follow the optimization
/// variable layout [r1, r2, r3, t1, t2, t3]; every entry lies in [0, 1].
struct ContributionTables {
  Eigen::Matrix<double, Eigen::Dynamic, 6> raw;       // |F . V|
  Eigen::Matrix<double, Eigen::Dynamic, 6> filtered;  // kappa_f applied
  Eigen::Matrix<double, Eigen::Dynamic, 6> strong;    // cos(45 deg) applied
  Vec6 l_combined = Vec6::Zero();                     // column sums of filtered
  Vec6 l_strong = Vec6::Zero();                       // column sums of strong
  std::vector<int> dropped_pairs;                     // near-zero torque
};

struct LocalizabilityParams {
  double kappa1 = 250.0;
  double kappa2 = 180.0;
  double kappa3 = 35.0;
  /// Low-contribution filter; cos(80 deg) suits sparse sensors, cos(60 deg)
  /// dense ones.
  double kappa_f = 0.17364817766693041;
  /// Strong-alignment cut, fixed at cos(45 deg).
  double strong_cut = 0.70710678118654752;
  /// Pairs with torque norm below this are dropped from the rotational rows.
  double torque_eps = 1e-6;
};

struct LocalizabilityReport {
  EigenBasis basis;
  ContributionTables tables;
  std::array<Localizability, 6> eta{};
  std::array<DecisionBranch, 6> triggering_branch{};

  int count_non_full(int first_column, int last_column) const;
};

/// Decomposes hessian_tt and hessian_rr of the given problem.
EigenBasis eigen_analyze(const LinearizedProblem& problem);

/// Projects each pair's force (n) and moment-normalized torque (p x n) onto
/// the eigenbasis and applies the two filtering stages. Matches and basis
/// must share the same (LiDAR) frame.
ContributionTables compute_contributions(const CorrespondenceSet& matches,
                                         const EigenBasis& basis,
                                         const LocalizabilityParams& params,
                                         Exec exec = default_exec());

/// Three-level decision tree, evaluated per direction:
///   full    if L_c >= kappa1 or L_s >= kappa2
///   partial if L_c >= kappa2 or L_s >= kappa3 (and not full)
///   none    otherwise
LocalizabilityReport categorize(const EigenBasis& basis,
                                ContributionTables tables,
                                const LocalizabilityParams& params);

/// Binary variant: full if L_c >= kappa1 or L_s >= kappa3, none otherwise.
/// Intended with kappa3 raised to kappa2; the partial tier never appears.
LocalizabilityReport categorize_binary(const EigenBasis& basis,
                                       ContributionTables tables,
                                       const LocalizabilityParams& params);

}  // namespace xicp
