#pragma once

#include <string>
#include <vector>

#include "xicp/geometry.hpp"
#include "xicp/kdtree.hpp"
#include "xicp/parallel.hpp"

namespace xicp {

/// One information pair: matched reading point p, reference point q and its
/// unit surface normal n, all expressed in the set's frame.
struct Correspondence {
  Vec3 p = Vec3::Zero();
  Vec3 q = Vec3::Zero();
  Vec3 n = Vec3::Zero();
  int index_reading = -1;
  int index_reference = -1;
  double distance = 0.0;
};

struct CorrespondenceSet {
  std::vector<Correspondence> pairs;
  std::string frame;

  std::size_t size() const { return pairs.size(); }
};

/// Per-point normals from the covariance of the k nearest neighbors (plus the
/// point itself): unit least-eigenvalue eigenvector, sign oriented toward the
/// viewpoint (default: origin of the cloud's frame). Points whose
/// neighborhood covariance has rank < 2 are dropped from the output cloud, so
/// they cannot enter matching.
PointCloud estimate_normals(const PointCloud& cloud, int k,
                            const Vec3& viewpoint = Vec3::Zero(),
                            Exec exec = default_exec());

/// Nearest-neighbor matching of the reading (transformed by t_init) against
/// the reference. One pair per reading point with a reference neighbor within
/// max_dist; pairs carry the reference normal. Result is in the reference
/// (map) frame. Throws TooFewMatches when fewer than 6 pairs survive.
CorrespondenceSet match(const PointCloud& reading, const PointCloud& reference,
                        const RigidTransform& t_init, double max_dist,
                        Exec exec = default_exec());

/// Same as match() but reusing a prebuilt tree over reference.points; the ICP
/// loop builds the tree once per registration call.
CorrespondenceSet match(const PointCloud& reading, const PointCloud& reference,
                        const KdTree& reference_tree,
                        const RigidTransform& t_init, double max_dist,
                        Exec exec = default_exec());

/// Maps map-frame pairs back into the LiDAR frame via inverse(t_map_lidar);
/// the localizability analysis runs there so the map's physical size cannot
/// leak into the rotational contributions.
CorrespondenceSet to_lidar_frame(const CorrespondenceSet& matches,
                                 const RigidTransform& t_map_lidar);

/// Shifts all pair coordinates by -origin, keeping the orientation. The
/// optimization runs in this map-aligned sensor-centered frame, which makes
/// the rotational sub-Hessian a pure rotation of its LiDAR-frame counterpart.
CorrespondenceSet recenter(const CorrespondenceSet& matches,
                           const Vec3& origin);

}  // namespace xicp
