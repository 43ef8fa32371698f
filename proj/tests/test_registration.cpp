#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "oracles.hpp"
#include "xicp/error.hpp"
#include "xicp/icp.hpp"
#include "xicp/problem.hpp"
#include "xicp/simulator.hpp"

using namespace xicp;

namespace {

CorrespondenceSet repeated_pair(const Vec3& p, const Vec3& n, const Vec3& q,
                                int count) {
  CorrespondenceSet set;
  set.frame = "L";
  for (int i = 0; i < count; ++i) {
    Correspondence c;
    c.p = p;
    c.n = n;
    c.q = q;
    c.index_reading = i;
    c.index_reference = i;
    c.distance = (p - q).norm();
    set.pairs.push_back(c);
  }
  return set;
}

/// Plane z=0 plus wall x=0: every DoF except translation along y is
/// constrained, so J has one exact null direction [0; e_y].
CorrespondenceSet rank5_pairs(std::mt19937& rng, int per_surface = 60) {
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  CorrespondenceSet set;
  set.frame = "L";
  int index = 0;
  for (int i = 0; i < per_surface; ++i) {
    Correspondence c;
    c.p = Vec3(coord(rng), coord(rng), 0.0);
    c.n = Vec3(0, 0, 1);
    c.q = c.p + Vec3(0, 0, 0.01 * coord(rng));
    c.index_reading = c.index_reference = index++;
    set.pairs.push_back(c);
  }
  for (int i = 0; i < per_surface; ++i) {
    Correspondence c;
    c.p = Vec3(0.0, coord(rng), coord(rng) + 3.5);
    c.n = Vec3(1, 0, 0);
    c.q = c.p + Vec3(0.01 * coord(rng), 0, 0);
    c.index_reading = c.index_reference = index++;
    set.pairs.push_back(c);
  }
  return set;
}

/// Three mutually orthogonal dense planes; fully constrains all six DoF.
PointCloud room_cloud(double spacing = 0.08) {
  PointCloud cloud;
  cloud.frame = "M";
  const int n = static_cast<int>(4.0 / spacing);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double a = -2.0 + 4.0 * i / n;
      const double b = -2.0 + 4.0 * j / n;
      cloud.points.emplace_back(a, b, 0.0);
      cloud.normals.emplace_back(0, 0, 1);
      cloud.points.emplace_back(a, -2.0, b + 2.0);
      cloud.normals.emplace_back(0, 1, 0);
      cloud.points.emplace_back(-2.0, a, b + 2.0);
      cloud.normals.emplace_back(1, 0, 0);
    }
  }
  return cloud;
}

}  // namespace

TEST_CASE("linearize row layout on the analytic pair") {
  // p=(1,0,0), n=(0,0,1): p x n = (0,-1,0).
  const CorrespondenceSet set =
      repeated_pair(Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(1, 0, 0), 6);
  const LinearizedProblem problem = linearize(set);
  const Vec6 expected_row = (Vec6() << 0, -1, 0, 0, 0, 1).finished();
  CHECK((problem.jacobian.row(0).transpose() - expected_row).norm() == 0.0);
  CHECK(problem.residuals[0] == 0.0);
  CHECK((problem.hessian_tt() - 6.0 * Vec3(0, 0, 1).asDiagonal().toDenseMatrix())
            .norm() == 0.0);
  CHECK((problem.hessian_rr() - 6.0 * Vec3(0, 1, 0).asDiagonal().toDenseMatrix())
            .norm() == 0.0);
}

TEST_CASE("linearize rejects fewer than six pairs") {
  const CorrespondenceSet set =
      repeated_pair(Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(1, 0, 0), 5);
  CHECK_THROWS_AS(linearize(set), TooFewMatches);
}

TEST_CASE("perfect alignment yields zero rhs and zero update") {
  std::mt19937 rng(71);
  CorrespondenceSet set = oracles::random_pairs(100, rng, 0.0);
  for (Correspondence& c : set.pairs) {
    c.q = c.p;
  }
  const LinearizedProblem problem = linearize(set);
  CHECK(problem.rhs.norm() == 0.0);
  CHECK(solve_unconstrained(problem).stacked().norm() == 0.0);
  CHECK(problem.residuals.squaredNorm() == 0.0);  // cost at x=0
}

TEST_CASE("hessian equals J^T J and is symmetric PSD") {
  std::mt19937 rng(73);
  const CorrespondenceSet set = oracles::random_pairs(200, rng);
  const LinearizedProblem problem = linearize(set);
  CHECK((problem.hessian - problem.jacobian.transpose() * problem.jacobian)
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  CHECK((problem.hessian - problem.hessian.transpose()).cwiseAbs().maxCoeff() <
        1e-10);
  Eigen::SelfAdjointEigenSolver<Mat6> eig(problem.hessian);
  CHECK(eig.eigenvalues()[0] >= -1e-9);
}

TEST_CASE("hessian matches the finite-difference oracle") {
  std::mt19937 rng(79);
  for (int trial = 0; trial < 10; ++trial) {
    const CorrespondenceSet set = oracles::random_pairs(200, rng);
    const LinearizedProblem problem = linearize(set);
    const Mat6 fd = oracles::finite_difference_hessian(set);
    const double rel = (problem.hessian - fd).norm() / fd.norm();
    CHECK(rel < 1e-5);
  }
}

TEST_CASE("solve recovers a planted full-rank solution") {
  std::mt19937 rng(83);
  CorrespondenceSet set = oracles::random_pairs(150, rng);
  LinearizedProblem problem = linearize(set);
  Vec6 planted;
  planted << 0.02, -0.01, 0.03, 0.2, -0.1, 0.15;
  problem.residuals = problem.jacobian * planted;
  problem.rhs = problem.jacobian.transpose() * problem.residuals;
  const PoseUpdate solved = solve_unconstrained(problem);
  CHECK((solved.stacked() - planted).norm() < 1e-9);
}

TEST_CASE("rank-deficient solve returns the minimum-norm solution") {
  std::mt19937 rng(89);
  const CorrespondenceSet set = rank5_pairs(rng);
  const LinearizedProblem problem = linearize(set);

  Eigen::SelfAdjointEigenSolver<Mat6> eig(problem.hessian);
  REQUIRE(eig.eigenvalues()[0] < 1e-12);  // one exact null direction
  REQUIRE(eig.eigenvalues()[1] > 1e-3);
  const Vec6 null_direction = eig.eigenvectors().col(0);

  const PoseUpdate solved = solve_unconstrained(problem);
  CHECK(std::abs(solved.stacked().dot(null_direction)) < 1e-9);
}

TEST_CASE("first-order recovery of a small planted transform") {
  std::mt19937 rng(97);
  for (double magnitude : {0.01, 0.05, 0.1}) {
    CorrespondenceSet set = oracles::random_pairs(300, rng, 0.0);
    const Vec3 axis = oracles::random_unit(rng);
    const Vec3 rotvec = axis * (magnitude * 0.6);
    const Vec3 trans = oracles::random_unit(rng) * (magnitude * 0.8);
    const Mat3 r = exp_rotvec(rotvec);
    for (Correspondence& c : set.pairs) {
      c.q = r * c.p + trans;
    }
    Vec6 planted;
    planted << rotvec, trans;

    const PoseUpdate solved = solve_unconstrained(linearize(set));
    const double error = (solved.stacked() - planted).norm();
    CHECK(error <= 5.0 * planted.squaredNorm());
  }
}

TEST_CASE("run_icp on identical clouds converges to identity") {
  const PointCloud room = room_cloud();
  PointCloud reading = room;
  reading.frame = "L";
  IcpConfig cfg;
  const IcpResult result =
      run_icp(reading, room, RigidTransform::identity(), cfg);
  CHECK(result.converged);
  CHECK(result.iterations <= 2);
  CHECK((result.pose.rotation - Mat3::Identity()).norm() < 1e-9);
  CHECK(result.pose.translation.norm() < 1e-9);
}

TEST_CASE("run_icp recovers a small displacement in a room") {
  const PointCloud room = room_cloud();
  PointCloud reading = room;
  reading.frame = "L";
  RigidTransform init;
  init.translation = Vec3(0.1, 0.05, 0.0);
  IcpConfig cfg;
  const IcpResult result = run_icp(reading, room, init, cfg);
  CHECK(result.converged);
  CHECK(result.pose.translation.norm() < 1e-3);
  CHECK((result.pose.rotation - Mat3::Identity()).norm() < 1e-3);
}

TEST_CASE("run_icp cost is non-increasing on a well-conditioned room") {
  const PointCloud room = room_cloud();
  PointCloud reading = room;
  reading.frame = "L";
  RigidTransform init;
  init.rotation = exp_rotvec(Vec3(0.0, 0.0, 0.02));
  init.translation = Vec3(0.08, -0.04, 0.03);
  IcpConfig cfg;
  const IcpResult result = run_icp(reading, room, init, cfg);
  for (std::size_t i = 1; i < result.per_iteration_costs.size(); ++i) {
    CHECK(result.per_iteration_costs[i] <=
          result.per_iteration_costs[i - 1] + 1e-12);
  }
}

TEST_CASE("tunnel slip: handler none drifts, xicp holds the prior") {
  WorldSpec spec;
  spec.kind = WorldKind::Tunnel;
  const PointCloud world = build_world(spec);
  const Vec3 axis = exp_rotvec(Vec3(0, 0, world_yaw_offset(spec.kind))) *
                    Vec3(1, 0, 0);

  RigidTransform gt_pose;
  gt_pose.rotation = exp_rotvec(Vec3(0, 0, world_yaw_offset(spec.kind)));
  gt_pose.translation = axis * 30.0 + Vec3(0, 0, 1.0);

  NoiseSpec noise;
  noise.range_noise = 0.0;
  const PointCloud scan = simulate_scan(world, gt_pose, 15.0, noise, 6000, 5);

  RigidTransform prior = gt_pose;
  prior.translation += 0.3 * axis;

  IcpConfig cfg;
  cfg.degeneracy_handler = DegeneracyHandler::None;
  const IcpResult plain = run_icp(scan, world, prior, cfg);
  const double plain_error =
      std::abs(axis.dot(plain.pose.translation - gt_pose.translation));
  CHECK(plain_error > 0.1);  // LiDAR slip along the tunnel

  cfg.degeneracy_handler = DegeneracyHandler::XIcp;
  const IcpResult constrained = run_icp(scan, world, prior, cfg);
  const double constrained_error =
      std::abs(axis.dot(constrained.pose.translation - gt_pose.translation));
  CHECK(constrained_error == doctest::Approx(0.3).epsilon(1e-6));
  // Orthogonal directions still converge.
  const Vec3 residual =
      constrained.pose.translation - gt_pose.translation - 0.3 * axis;
  CHECK(residual.norm() < 1e-3);
}

TEST_CASE("xicp equals handler none when everything is localizable") {
  const PointCloud room = room_cloud();
  PointCloud reading = room;
  reading.frame = "L";
  RigidTransform init;
  init.translation = Vec3(0.05, -0.02, 0.04);

  IcpConfig cfg;
  cfg.localizability.kappa1 = 50.0;  // the small room clears lowered gates
  cfg.localizability.kappa2 = 40.0;
  cfg.localizability.kappa3 = 10.0;

  cfg.degeneracy_handler = DegeneracyHandler::None;
  const IcpResult plain = run_icp(reading, room, init, cfg);
  cfg.degeneracy_handler = DegeneracyHandler::XIcp;
  const IcpResult xicp = run_icp(reading, room, init, cfg);

  for (const LocalizabilityReport& report : xicp.per_iteration_reports) {
    for (int j = 0; j < 6; ++j) {
      REQUIRE(report.eta[j] == Localizability::Full);
    }
  }
  CHECK((plain.pose.rotation - xicp.pose.rotation).cwiseAbs().maxCoeff() <=
        1e-12);
  CHECK((plain.pose.translation - xicp.pose.translation).cwiseAbs().maxCoeff() <=
        1e-12);
}
