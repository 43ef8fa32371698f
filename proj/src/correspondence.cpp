#include "xicp/correspondence.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "xicp/error.hpp"

namespace xicp {

PointCloud estimate_normals(const PointCloud& cloud, int k,
                            const Vec3& viewpoint, Exec exec) {
  if (k < 3) {
    throw Error("estimate_normals: k must be >= 3");
  }
  if (cloud.size() < static_cast<std::size_t>(k) + 1) {
    throw Error("estimate_normals: cloud smaller than k+1 points");
  }

  const KdTree tree(cloud.points);
  const auto n = static_cast<std::ptrdiff_t>(cloud.size());
  std::vector<Vec3> normals(cloud.size());
  std::vector<std::uint8_t> valid(cloud.size(), 0);

  parallel_for(
      n,
      [&](std::ptrdiff_t i) {
        thread_local std::vector<int> neighbors;
        tree.knn(cloud.points[i], k + 1, neighbors);  // includes the point

        Vec3 mean = Vec3::Zero();
        for (int idx : neighbors) {
          mean += cloud.points[idx];
        }
        mean /= static_cast<double>(neighbors.size());
        Mat3 cov = Mat3::Zero();
        for (int idx : neighbors) {
          const Vec3 d = cloud.points[idx] - mean;
          cov += d * d.transpose();
        }

        Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        const Vec3 evals = eig.eigenvalues();  // ascending
        // Rank < 2 (collinear neighborhood): no plane is defined.
        if (evals[1] <= 1e-12 * std::max(evals[2], 1e-300)) {
          return;
        }
        Vec3 normal = eig.eigenvectors().col(0);
        if (normal.dot(viewpoint - cloud.points[i]) < 0.0) {
          normal = -normal;
        }
        normals[i] = normal;
        valid[i] = 1;
      },
      exec);

  PointCloud out;
  out.frame = cloud.frame;
  out.points.reserve(cloud.size());
  out.normals.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (valid[i]) {
      out.points.push_back(cloud.points[i]);
      out.normals.push_back(normals[i]);
    }
  }
  return out;
}

CorrespondenceSet match(const PointCloud& reading, const PointCloud& reference,
                        const RigidTransform& t_init, double max_dist,
                        Exec exec) {
  const KdTree tree(reference.points);
  return match(reading, reference, tree, t_init, max_dist, exec);
}

CorrespondenceSet match(const PointCloud& reading, const PointCloud& reference,
                        const KdTree& reference_tree,
                        const RigidTransform& t_init, double max_dist,
                        Exec exec) {
  if (!reference.has_normals()) {
    throw Error("match: reference cloud has no normals");
  }
  if (max_dist <= 0.0) {
    throw Error("match: max_dist must be positive");
  }

  const auto n = static_cast<std::ptrdiff_t>(reading.size());
  std::vector<int> hits(reading.size(), -1);
  std::vector<Vec3> transformed(reading.size());
  parallel_for(
      n,
      [&](std::ptrdiff_t i) {
        transformed[i] =
            t_init.rotation * reading.points[i] + t_init.translation;
        hits[i] = reference_tree.nearest(transformed[i], max_dist);
      },
      exec);

  CorrespondenceSet out;
  out.frame = reference.frame;
  out.pairs.reserve(reading.size());
  for (std::size_t i = 0; i < reading.size(); ++i) {
    if (hits[i] < 0) {
      continue;
    }
    Correspondence c;
    c.p = transformed[i];
    c.q = reference.points[hits[i]];
    c.n = reference.normals[hits[i]];
    c.index_reading = static_cast<int>(i);
    c.index_reference = hits[i];
    c.distance = (c.p - c.q).norm();
    out.pairs.push_back(c);
  }
  if (out.pairs.size() < 6) {
    throw TooFewMatches("match: " + std::to_string(out.pairs.size()) +
                        " pairs, need at least 6");
  }
  return out;
}

CorrespondenceSet to_lidar_frame(const CorrespondenceSet& matches,
                                 const RigidTransform& t_map_lidar) {
  const RigidTransform t = inverse(t_map_lidar);
  CorrespondenceSet out;
  out.frame = "L";
  out.pairs.resize(matches.pairs.size());
  for (std::size_t i = 0; i < matches.pairs.size(); ++i) {
    const Correspondence& c = matches.pairs[i];
    Correspondence& o = out.pairs[i];
    o = c;
    o.p = t.rotation * c.p + t.translation;
    o.q = t.rotation * c.q + t.translation;
    o.n = t.rotation * c.n;
  }
  return out;
}

CorrespondenceSet recenter(const CorrespondenceSet& matches,
                           const Vec3& origin) {
  CorrespondenceSet out;
  out.frame = matches.frame;
  out.pairs.resize(matches.pairs.size());
  for (std::size_t i = 0; i < matches.pairs.size(); ++i) {
    const Correspondence& c = matches.pairs[i];
    Correspondence& o = out.pairs[i];
    o = c;
    o.p = c.p - origin;
    o.q = c.q - origin;
  }
  return out;
}

}  // namespace xicp
