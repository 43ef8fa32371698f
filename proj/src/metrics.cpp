#include "xicp/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "xicp/error.hpp"
#include "xicp/kdtree.hpp"

namespace xicp {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double rotation_angle_deg(const Mat3& r) {
  const double c = std::min(1.0, std::max(-1.0, (r.trace() - 1.0) * 0.5));
  return std::acos(c) * kRadToDeg;
}

struct Stats {
  double mean = 0.0;
  double std_dev = 0.0;
};

Stats stats_of(const std::vector<double>& values) {
  Stats s;
  if (values.empty()) {
    return s;
  }
  for (double v : values) {
    s.mean += v;
  }
  s.mean /= static_cast<double>(values.size());
  for (double v : values) {
    s.std_dev += (v - s.mean) * (v - s.mean);
  }
  s.std_dev = std::sqrt(s.std_dev / static_cast<double>(values.size()));
  return s;
}

double median_period(const Trajectory& reference) {
  if (reference.size() < 2) {
    return std::numeric_limits<double>::infinity();
  }
  std::vector<double> diffs;
  diffs.reserve(reference.size() - 1);
  for (std::size_t i = 1; i < reference.size(); ++i) {
    diffs.push_back(reference.poses[i].t - reference.poses[i - 1].t);
  }
  std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2,
                   diffs.end());
  return diffs[diffs.size() / 2];
}

/// Indices into (estimate, reference) paired by nearest timestamp.
std::vector<std::pair<int, int>> associate(const Trajectory& estimate,
                                           const Trajectory& reference) {
  std::vector<std::pair<int, int>> pairs;
  const double tolerance = 0.5 * median_period(reference);
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double t = estimate.poses[i].t;
    int best = -1;
    double best_dt = tolerance;
    for (std::size_t j = 0; j < reference.size(); ++j) {
      const double dt = std::abs(reference.poses[j].t - t);
      if (dt <= best_dt) {
        best_dt = dt;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0) {
      pairs.emplace_back(static_cast<int>(i), best);
    }
  }
  if (pairs.empty()) {
    throw EmptyAssociation("no timestamp pairs associate");
  }
  return pairs;
}

std::vector<double> cumulative_distance(const Trajectory& t) {
  std::vector<double> dist(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    dist[i] = dist[i - 1] + (t.poses[i].pose.translation -
                             t.poses[i - 1].pose.translation)
                                .norm();
  }
  return dist;
}

/// Rigid Procrustes (Kabsch): R, t minimizing sum ||R a_i + t - b_i||^2.
RigidTransform procrustes(const std::vector<Vec3>& a,
                          const std::vector<Vec3>& b) {
  Vec3 mean_a = Vec3::Zero();
  Vec3 mean_b = Vec3::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= static_cast<double>(a.size());
  mean_b /= static_cast<double>(a.size());
  Mat3 cross = Mat3::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    cross += (b[i] - mean_b) * (a[i] - mean_a).transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
    d(2, 2) = -1.0;
  }
  RigidTransform align;
  align.rotation = svd.matrixU() * d * svd.matrixV().transpose();
  align.translation = mean_b - align.rotation * mean_a;
  return align;
}

}  // namespace

ApeResult ape(const Trajectory& estimate, const Trajectory& reference,
              ApeAlignment alignment, double prefix_meters) {
  const auto pairs = associate(estimate, reference);

  RigidTransform align;
  if (alignment == ApeAlignment::Origin) {
    const auto& [ei, ri] = pairs.front();
    align = compose(reference.poses[ri].pose,
                    inverse(estimate.poses[ei].pose));
  } else {
    const auto cum = cumulative_distance(reference);
    std::vector<Vec3> est_positions;
    std::vector<Vec3> ref_positions;
    for (const auto& [ei, ri] : pairs) {
      if (cum[ri] <= prefix_meters) {
        est_positions.push_back(estimate.poses[ei].pose.translation);
        ref_positions.push_back(reference.poses[ri].pose.translation);
      }
    }
    if (est_positions.empty()) {
      throw EmptyAssociation("no poses within the alignment prefix");
    }
    align = procrustes(est_positions, ref_positions);
  }

  std::vector<double> trans_errors;
  std::vector<double> rot_errors;
  trans_errors.reserve(pairs.size());
  rot_errors.reserve(pairs.size());
  for (const auto& [ei, ri] : pairs) {
    const RigidTransform aligned = compose(align, estimate.poses[ei].pose);
    const RigidTransform& ref = reference.poses[ri].pose;
    trans_errors.push_back((aligned.translation - ref.translation).norm());
    rot_errors.push_back(
        rotation_angle_deg(aligned.rotation * ref.rotation.transpose()));
  }

  ApeResult result;
  const Stats ts = stats_of(trans_errors);
  const Stats rs = stats_of(rot_errors);
  result.trans_mean = ts.mean;
  result.trans_std = ts.std_dev;
  result.rot_mean_deg = rs.mean;
  result.rot_std_deg = rs.std_dev;
  result.last_position_error = trans_errors.back();
  result.associated = static_cast<int>(pairs.size());
  return result;
}

RpeResult rpe_per_distance(const Trajectory& estimate,
                           const Trajectory& reference, double segment_m) {
  const auto pairs = associate(estimate, reference);
  std::vector<double> cum(pairs.size(), 0.0);
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    cum[i] = cum[i - 1] + (reference.poses[pairs[i].second].pose.translation -
                           reference.poses[pairs[i - 1].second].pose.translation)
                              .norm();
  }

  std::vector<double> trans_errors;
  std::vector<double> rot_errors;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::size_t j = i + 1;
    while (j < pairs.size() && cum[j] - cum[i] < segment_m) {
      ++j;
    }
    if (j >= pairs.size()) {
      break;
    }
    const auto rel = [&](const Trajectory& t, int a, int b) {
      return compose(inverse(t.poses[a].pose), t.poses[b].pose);
    };
    const RigidTransform ref_rel =
        rel(reference, pairs[i].second, pairs[j].second);
    const RigidTransform est_rel =
        rel(estimate, pairs[i].first, pairs[j].first);
    const RigidTransform error = compose(inverse(ref_rel), est_rel);
    trans_errors.push_back(error.translation.norm());
    rot_errors.push_back(rotation_angle_deg(error.rotation));
  }
  if (trans_errors.empty()) {
    throw EmptyAssociation("reference shorter than one segment");
  }

  RpeResult result;
  const Stats ts = stats_of(trans_errors);
  const Stats rs = stats_of(rot_errors);
  result.trans_mean = ts.mean;
  result.trans_std = ts.std_dev;
  result.rot_mean_deg = rs.mean;
  result.rot_std_deg = rs.std_dev;
  result.segments = static_cast<int>(trans_errors.size());
  return result;
}

MapErrorResult map_p2p_error(const PointCloud& built, const PointCloud& truth,
                             Exec exec) {
  if (truth.size() == 0) {
    throw Error("map_p2p_error: ground truth is empty");
  }
  const KdTree tree(truth.points);
  MapErrorResult result;
  result.per_point.resize(built.size());
  parallel_for(
      static_cast<std::ptrdiff_t>(built.size()),
      [&](std::ptrdiff_t i) {
        const int idx = tree.nearest(built.points[i],
                                     std::numeric_limits<double>::infinity());
        result.per_point[i] = (built.points[i] - truth.points[idx]).norm();
      },
      exec);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double d : result.per_point) {
    sum += d;
    sum_sq += d * d;
  }
  if (!result.per_point.empty()) {
    result.mean = sum / static_cast<double>(result.per_point.size());
    result.rmse =
        std::sqrt(sum_sq / static_cast<double>(result.per_point.size()));
  }
  return result;
}

}  // namespace xicp
