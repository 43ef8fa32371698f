#pragma once

#include <array>

#include "xicp/geometry.hpp"
#include "xicp/localizability.hpp"
#include "xicp/problem.hpp"

namespace xicp {

enum class RemappingMode { FixedThreshold, RelativeCondition };

struct RemappingConfig {
  double eigenvalue_threshold = 120.0;  // FixedThreshold mode
  double condition_ratio = 60.0;        // RelativeCondition mode
  RemappingMode mode = RemappingMode::FixedThreshold;
};

struct RemapResult {
  PoseUpdate update;
  std::array<bool, 6> degenerate_mask{};  // per eigenvalue, ascending order
  Vec6 eigenvalues = Vec6::Zero();        // combined 6x6 spectrum, ascending
};

/// Eigenvalue-threshold solution remapping. The full 6x6 Hessian is
/// decomposed as one spectrum, so a single threshold has to cover both the
/// rotation and translation scales. Directions with eigenvalue below the
/// threshold (or with condition ratio above the limit) are flagged degenerate
/// and the unconstrained solution is projected onto the span of the retained
/// eigenvectors; with nothing flagged the solution passes through unchanged.
RemapResult solution_remap(const LinearizedProblem& problem,
                           const RemappingConfig& cfg);

/// Adapts a remap result to the localizability report schema used by the
/// per-iteration CSV: the combined eigenvalues fill the six eigenvalue slots
/// in ascending order, contributions are zero, and the mask maps to
/// {degenerate -> none, otherwise -> full}.
LocalizabilityReport remap_report(const RemapResult& result);

}  // namespace xicp
