#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "oracles.hpp"
#include "xicp/baselines.hpp"
#include "xicp/icp.hpp"
#include "xicp/problem.hpp"

using namespace xicp;

namespace {

/// Plane plus wall scene with the exact null direction [0; e_y].
CorrespondenceSet rank5_pairs(std::mt19937& rng) {
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  CorrespondenceSet set;
  set.frame = "M";
  for (int i = 0; i < 80; ++i) {
    Correspondence c;
    c.p = Vec3(coord(rng), coord(rng), 0.0);
    c.n = Vec3(0, 0, 1);
    c.q = c.p + Vec3(0, 0, 0.02 * coord(rng));
    set.pairs.push_back(c);
    Correspondence w;
    w.p = Vec3(0.0, coord(rng), coord(rng) + 3.5);
    w.n = Vec3(1, 0, 0);
    w.q = w.p + Vec3(0.02 * coord(rng), 0, 0);
    set.pairs.push_back(w);
  }
  return set;
}

}  // namespace

TEST_CASE("threshold zero is a pass-through") {
  std::mt19937 rng(311);
  const LinearizedProblem problem = linearize(oracles::random_pairs(120, rng));
  RemappingConfig cfg;
  cfg.eigenvalue_threshold = 0.0;
  const RemapResult result = solution_remap(problem, cfg);
  for (bool degenerate : result.degenerate_mask) {
    CHECK_FALSE(degenerate);
  }
  const PoseUpdate unconstrained = solve_unconstrained(problem);
  CHECK((result.update.stacked() - unconstrained.stacked()).norm() == 0.0);
}

TEST_CASE("threshold above the largest eigenvalue zeroes the update") {
  std::mt19937 rng(313);
  const LinearizedProblem problem = linearize(oracles::random_pairs(120, rng));
  Eigen::SelfAdjointEigenSolver<Mat6> eig(problem.hessian);
  RemappingConfig cfg;
  cfg.eigenvalue_threshold = eig.eigenvalues()[5] * 2.0;
  const RemapResult result = solution_remap(problem, cfg);
  for (bool degenerate : result.degenerate_mask) {
    CHECK(degenerate);
  }
  CHECK(result.update.stacked().cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("planted null direction is projected out") {
  std::mt19937 rng(317);
  const LinearizedProblem problem = linearize(rank5_pairs(rng));
  Eigen::SelfAdjointEigenSolver<Mat6> eig(problem.hessian);
  REQUIRE(eig.eigenvalues()[0] < 1e-10);
  const Vec6 null_direction = eig.eigenvectors().col(0);

  RemappingConfig cfg;  // default threshold 120
  const RemapResult result = solution_remap(problem, cfg);
  CHECK(result.degenerate_mask[0]);
  CHECK(std::abs(result.update.stacked().dot(null_direction)) < 1e-9);

  // Matches the explicit projector onto the retained eigenvectors.
  Mat6 projector = Mat6::Zero();
  for (int i = 0; i < 6; ++i) {
    if (eig.eigenvalues()[i] >= cfg.eigenvalue_threshold) {
      projector += eig.eigenvectors().col(i) *
                   eig.eigenvectors().col(i).transpose();
    }
  }
  const Vec6 expected = projector * solve_unconstrained(problem).stacked();
  CHECK((result.update.stacked() - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("remapped update is the orthogonal projection of the solution") {
  std::mt19937 rng(331);
  for (int trial = 0; trial < 20; ++trial) {
    const LinearizedProblem problem =
        linearize(oracles::random_pairs(150, rng));
    Eigen::SelfAdjointEigenSolver<Mat6> eig(problem.hessian);
    RemappingConfig cfg;
    cfg.eigenvalue_threshold = eig.eigenvalues()[2] + 1.0;  // mask 3 of 6
    const RemapResult result = solution_remap(problem, cfg);
    Mat6 projector = Mat6::Zero();
    for (int i = 0; i < 6; ++i) {
      if (!result.degenerate_mask[i]) {
        projector += eig.eigenvectors().col(i) *
                     eig.eigenvectors().col(i).transpose();
      }
    }
    const Vec6 expected = projector * solve_unconstrained(problem).stacked();
    CHECK((result.update.stacked() - expected).norm() < 1e-10);
  }
}

TEST_CASE("raising the threshold never shrinks the degenerate set") {
  std::mt19937 rng(337);
  const LinearizedProblem problem = linearize(oracles::random_pairs(150, rng));
  RemappingConfig cfg;
  std::array<bool, 6> previous{};
  for (double threshold : {0.0, 5.0, 20.0, 120.0, 1e4, 1e8}) {
    cfg.eigenvalue_threshold = threshold;
    const RemapResult result = solution_remap(problem, cfg);
    for (int i = 0; i < 6; ++i) {
      if (previous[i]) {
        CHECK(result.degenerate_mask[i]);
      }
    }
    previous = result.degenerate_mask;
  }
}

TEST_CASE("relative condition mode flags the spread spectrum") {
  std::mt19937 rng(347);
  const LinearizedProblem problem = linearize(rank5_pairs(rng));
  RemappingConfig cfg;
  cfg.mode = RemappingMode::RelativeCondition;
  cfg.condition_ratio = 60.0;
  const RemapResult result = solution_remap(problem, cfg);
  CHECK(result.degenerate_mask[0]);  // the exact null has infinite ratio
  CHECK_FALSE(result.degenerate_mask[5]);
}

TEST_CASE("remap report maps the mask onto categories") {
  RemapResult result;
  result.degenerate_mask = {true, false, false, false, false, true};
  result.eigenvalues << 1, 2, 3, 4, 5, 6;
  const LocalizabilityReport report = remap_report(result);
  CHECK(report.eta[0] == Localizability::None);
  CHECK(report.eta[1] == Localizability::Full);
  CHECK(report.eta[5] == Localizability::None);
  CHECK(report.basis.sigma_r[0] == 1.0);
  CHECK(report.basis.sigma_t[2] == 6.0);
}

TEST_CASE("mask-free remapping reproduces the plain ICP pose") {
  // Small synthetic room; threshold 0 never masks, so the trajectory is the
  // handler-None one bit for bit.
  PointCloud room;
  room.frame = "M";
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 40; ++j) {
      const double a = -2.0 + 0.1 * i;
      const double b = -2.0 + 0.1 * j;
      room.points.emplace_back(a, b, 0.0);
      room.normals.emplace_back(0, 0, 1);
      room.points.emplace_back(a, -2.0, b + 2.0);
      room.normals.emplace_back(0, 1, 0);
      room.points.emplace_back(-2.0, a, b + 2.0);
      room.normals.emplace_back(1, 0, 0);
    }
  }
  PointCloud reading = room;
  reading.frame = "L";
  RigidTransform init;
  init.translation = Vec3(0.06, -0.03, 0.02);
  init.rotation = exp_rotvec(Vec3(0, 0, 0.01));

  IcpConfig cfg;
  cfg.degeneracy_handler = DegeneracyHandler::None;
  const IcpResult plain = run_icp(reading, room, init, cfg);
  cfg.degeneracy_handler = DegeneracyHandler::SolutionRemapping;
  cfg.remapping.eigenvalue_threshold = 0.0;
  const IcpResult remapped = run_icp(reading, room, init, cfg);
  CHECK((plain.pose.rotation - remapped.pose.rotation).cwiseAbs().maxCoeff() <=
        1e-12);
  CHECK((plain.pose.translation - remapped.pose.translation)
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
}
