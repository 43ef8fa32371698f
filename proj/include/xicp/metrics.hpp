#pragma once

#include <vector>

#include "xicp/geometry.hpp"
#include "xicp/parallel.hpp"

namespace xicp {

/// Stamped pose sequence with strictly increasing timestamps.
struct Trajectory {
  std::vector<StampedPose> poses;

  std::size_t size() const { return poses.size(); }
};

enum class ApeAlignment { Origin, PrefixMeters };

struct ApeResult {
  double trans_mean = 0.0;
  double trans_std = 0.0;
  double rot_mean_deg = 0.0;
  double rot_std_deg = 0.0;
  double last_position_error = 0.0;
  int associated = 0;
};

/// Absolute pose error after rigid alignment: Origin aligns by the first-pose
/// difference, PrefixMeters by closed-form Procrustes over the poses within
/// the first prefix_meters of reference traveled distance. Poses associate by
/// nearest timestamp within half the reference frame period; throws
/// EmptyAssociation when nothing associates.
ApeResult ape(const Trajectory& estimate, const Trajectory& reference,
              ApeAlignment alignment, double prefix_meters = 15.0);

struct RpeResult {
  double trans_mean = 0.0;
  double trans_std = 0.0;
  double rot_mean_deg = 0.0;
  double rot_std_deg = 0.0;
  int segments = 0;
};

/// Relative pose error per segment_m of traveled reference distance.
RpeResult rpe_per_distance(const Trajectory& estimate,
                           const Trajectory& reference,
                           double segment_m = 10.0);

struct MapErrorResult {
  double mean = 0.0;
  double rmse = 0.0;
  std::vector<double> per_point;
};

/// Distance from every built-map point to its nearest ground-truth point.
MapErrorResult map_p2p_error(const PointCloud& built, const PointCloud& truth,
                             Exec exec = default_exec());

}  // namespace xicp
