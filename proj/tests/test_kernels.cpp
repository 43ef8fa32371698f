// The parallel kernels must match their serial reference bit for bit: every
// loop writes disjoint slots and reductions stay in fixed index order.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "xicp/correspondence.hpp"
#include "xicp/localizability.hpp"
#include "xicp/metrics.hpp"
#include "xicp/problem.hpp"

using namespace xicp;

namespace {

PointCloud random_cloud(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  PointCloud cloud;
  cloud.frame = "M";
  for (int i = 0; i < n; ++i) {
    cloud.points.emplace_back(coord(rng), coord(rng), coord(rng));
    cloud.normals.push_back(oracles::random_unit(rng));
  }
  return cloud;
}

}  // namespace

TEST_CASE("apply_transform: serial == parallel") {
  std::mt19937 rng(601);
  const PointCloud cloud = random_cloud(5000, rng);
  RigidTransform t;
  t.rotation = exp_rotvec(Vec3(0.3, -0.5, 0.2));
  t.translation = Vec3(2, -1, 4);
  const PointCloud serial = apply_transform(t, cloud, "M", Exec::Serial);
  const PointCloud parallel = apply_transform(t, cloud, "M", Exec::Parallel);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK((serial.points[i] - parallel.points[i]).norm() == 0.0);
    CHECK((serial.normals[i] - parallel.normals[i]).norm() == 0.0);
  }
}

TEST_CASE("match: serial == parallel") {
  std::mt19937 rng(607);
  const PointCloud reference = random_cloud(4000, rng);
  PointCloud reading = random_cloud(2000, rng);
  reading.normals.clear();
  RigidTransform t;
  t.translation = Vec3(0.2, 0.1, -0.3);
  const CorrespondenceSet serial =
      match(reading, reference, t, 2.0, Exec::Serial);
  const CorrespondenceSet parallel =
      match(reading, reference, t, 2.0, Exec::Parallel);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial.pairs[i].index_reference == parallel.pairs[i].index_reference);
    CHECK(serial.pairs[i].distance == parallel.pairs[i].distance);
  }
}

TEST_CASE("estimate_normals: serial == parallel") {
  std::mt19937 rng(613);
  PointCloud cloud = random_cloud(3000, rng);
  cloud.normals.clear();
  const PointCloud serial = estimate_normals(cloud, 10, Vec3::Zero(),
                                             Exec::Serial);
  const PointCloud parallel = estimate_normals(cloud, 10, Vec3::Zero(),
                                               Exec::Parallel);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK((serial.normals[i] - parallel.normals[i]).norm() == 0.0);
  }
}

TEST_CASE("linearize: serial == parallel") {
  std::mt19937 rng(617);
  const CorrespondenceSet matches = oracles::random_pairs(5000, rng);
  const LinearizedProblem serial = linearize(matches, Exec::Serial);
  const LinearizedProblem parallel = linearize(matches, Exec::Parallel);
  CHECK((serial.jacobian - parallel.jacobian).cwiseAbs().maxCoeff() == 0.0);
  CHECK((serial.residuals - parallel.residuals).cwiseAbs().maxCoeff() == 0.0);
  CHECK((serial.hessian - parallel.hessian).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("compute_contributions: serial == parallel") {
  std::mt19937 rng(619);
  const CorrespondenceSet matches = oracles::random_pairs(8000, rng);
  const EigenBasis basis = eigen_analyze(linearize(matches));
  const LocalizabilityParams params;
  const ContributionTables serial =
      compute_contributions(matches, basis, params, Exec::Serial);
  const ContributionTables parallel =
      compute_contributions(matches, basis, params, Exec::Parallel);
  CHECK((serial.raw - parallel.raw).cwiseAbs().maxCoeff() == 0.0);
  CHECK((serial.filtered - parallel.filtered).cwiseAbs().maxCoeff() == 0.0);
  CHECK((serial.strong - parallel.strong).cwiseAbs().maxCoeff() == 0.0);
  CHECK((serial.l_combined - parallel.l_combined).norm() == 0.0);
  CHECK((serial.l_strong - parallel.l_strong).norm() == 0.0);
  CHECK(serial.dropped_pairs == parallel.dropped_pairs);
}

TEST_CASE("map_p2p_error: serial == parallel") {
  std::mt19937 rng(631);
  const PointCloud truth = random_cloud(4000, rng);
  const PointCloud built = random_cloud(1500, rng);
  const MapErrorResult serial = map_p2p_error(built, truth, Exec::Serial);
  const MapErrorResult parallel = map_p2p_error(built, truth, Exec::Parallel);
  CHECK(serial.mean == parallel.mean);
  CHECK(serial.rmse == parallel.rmse);
  CHECK(serial.per_point == parallel.per_point);
}
