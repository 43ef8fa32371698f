#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "xicp/correspondence.hpp"
#include "xicp/error.hpp"
#include "xicp/kdtree.hpp"
#include "xicp/localizability.hpp"
#include "xicp/problem.hpp"

using namespace xicp;

namespace {

PointCloud random_cloud(int n, std::mt19937& rng, double extent = 10.0) {
  std::uniform_real_distribution<double> coord(-extent, extent);
  PointCloud cloud;
  cloud.frame = "M";
  for (int i = 0; i < n; ++i) {
    cloud.points.emplace_back(coord(rng), coord(rng), coord(rng));
  }
  return cloud;
}

PointCloud plane_grid(int per_side, double spacing, const std::string& frame) {
  PointCloud cloud;
  cloud.frame = frame;
  for (int ix = 0; ix < per_side; ++ix) {
    for (int iy = 0; iy < per_side; ++iy) {
      cloud.points.emplace_back(ix * spacing, iy * spacing, 0.0);
    }
  }
  return cloud;
}

}  // namespace

TEST_CASE("kd-tree nearest matches the brute-force oracle") {
  std::mt19937 rng(31);
  const PointCloud cloud = random_cloud(1500, rng);
  const KdTree tree(cloud.points);
  std::uniform_real_distribution<double> coord(-12.0, 12.0);
  for (int i = 0; i < 500; ++i) {
    const Vec3 query(coord(rng), coord(rng), coord(rng));
    CHECK(tree.nearest(query, 4.0) ==
          oracles::brute_force_nearest(cloud.points, query, 4.0));
  }
}

TEST_CASE("kd-tree knn matches the brute-force oracle") {
  std::mt19937 rng(37);
  const PointCloud cloud = random_cloud(800, rng);
  const KdTree tree(cloud.points);
  std::uniform_real_distribution<double> coord(-11.0, 11.0);
  std::vector<int> found;
  for (int i = 0; i < 200; ++i) {
    const Vec3 query(coord(rng), coord(rng), coord(rng));
    tree.knn(query, 11, found);
    CHECK(found == oracles::brute_force_knn(cloud.points, query, 11));
  }
}

TEST_CASE("kd-tree breaks exact ties toward the lowest index") {
  PointCloud cloud;
  cloud.points = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(1, 0, 0)};
  const KdTree tree(cloud.points);
  CHECK(tree.nearest(Vec3(0, 0, 0), 2.0) == 0);
  CHECK(tree.nearest(Vec3(1, 0, 0), 0.5) == 0);
}

TEST_CASE("estimate_normals on a plane") {
  PointCloud cloud = plane_grid(10, 0.3, "M");
  const PointCloud out = estimate_normals(cloud, 10, Vec3(1.5, 1.5, 5.0));
  REQUIRE(out.size() == cloud.size());
  for (const Vec3& n : out.normals) {
    // Planar symmetry: every normal is +/- e_z within 1e-3 angular error,
    // oriented toward the overhead viewpoint.
    CHECK(std::abs(n.dot(Vec3(0, 0, 1))) > std::cos(1e-3));
    CHECK(n.z() > 0.0);
  }
}

TEST_CASE("estimate_normals orients toward the viewpoint on a sphere") {
  PointCloud cloud;
  cloud.frame = "M";
  std::mt19937 rng(41);
  for (int i = 0; i < 400; ++i) {
    cloud.points.push_back(oracles::random_unit(rng) * 5.0);
  }
  const PointCloud out = estimate_normals(cloud, 8, Vec3::Zero());
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out.normals[i].dot(out.points[i]) < 0.0);  // inward
  }
}

TEST_CASE("estimate_normals matches a per-point covariance oracle") {
  std::mt19937 rng(43);
  PointCloud cloud = plane_grid(14, 0.25, "M");
  std::normal_distribution<double> rough(0.0, 0.02);
  for (Vec3& p : cloud.points) {
    p.z() += rough(rng);
  }
  const PointCloud out = estimate_normals(cloud, 9, Vec3(2.0, 2.0, 10.0));
  REQUIRE(out.size() == cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto neighbors =
        oracles::brute_force_knn(cloud.points, cloud.points[i], 10);
    Vec3 mean = Vec3::Zero();
    for (int idx : neighbors) mean += cloud.points[idx];
    mean /= static_cast<double>(neighbors.size());
    Mat3 cov = Mat3::Zero();
    for (int idx : neighbors) {
      const Vec3 d = cloud.points[idx] - mean;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    Vec3 expected = eig.eigenvectors().col(0);
    if (expected.dot(Vec3(2.0, 2.0, 10.0) - cloud.points[i]) < 0.0) {
      expected = -expected;
    }
    CHECK((out.normals[i] - expected).norm() < 1e-12);
  }
}

TEST_CASE("estimate_normals drops collinear neighborhoods") {
  PointCloud cloud;
  cloud.frame = "M";
  for (int i = 0; i < 12; ++i) {
    cloud.points.emplace_back(i * 0.1, 0.0, 0.0);  // a line
  }
  const PointCloud out = estimate_normals(cloud, 4);
  CHECK(out.size() == 0);
}

TEST_CASE("match of a cloud against itself") {
  std::mt19937 rng(47);
  PointCloud reference = random_cloud(300, rng);
  reference.normals.resize(reference.size());
  for (Vec3& n : reference.normals) n = oracles::random_unit(rng);
  PointCloud reading = reference;
  reading.normals.clear();
  reading.frame = "L";

  const CorrespondenceSet matches =
      match(reading, reference, RigidTransform::identity(), 0.5);
  CHECK(matches.size() == reference.size());
  CHECK(matches.frame == "M");
  for (const Correspondence& c : matches.pairs) {
    CHECK(c.distance == 0.0);
    CHECK(c.index_reading == c.index_reference);
    CHECK(std::abs(c.distance - (c.p - c.q).norm()) < 1e-9);
  }
}

TEST_CASE("match on a shifted dense plane stays within the shift bound") {
  PointCloud reference = plane_grid(40, 0.1, "M");
  reference.normals.assign(reference.size(), Vec3(0, 0, 1));
  PointCloud reading = plane_grid(40, 0.1, "L");
  RigidTransform shift;
  shift.translation = Vec3(0.05, 0.0, 0.0);
  const CorrespondenceSet matches = match(reading, reference, shift, 0.5);
  for (const Correspondence& c : matches.pairs) {
    CHECK(c.distance <= 0.05 + 0.1 + 1e-12);
  }
}

TEST_CASE("match equals the exhaustive matcher on random clouds") {
  std::mt19937 rng(53);
  PointCloud reference = random_cloud(5000, rng);
  reference.normals.resize(reference.size());
  for (Vec3& n : reference.normals) n = oracles::random_unit(rng);
  const PointCloud reading = random_cloud(1000, rng);

  RigidTransform t;
  t.rotation = exp_rotvec(Vec3(0.1, 0.2, -0.1));
  t.translation = Vec3(0.5, -0.3, 0.2);
  const double max_dist = 1.5;
  const CorrespondenceSet matches = match(reading, reference, t, max_dist);

  std::size_t expected_count = 0;
  for (std::size_t i = 0; i < reading.size(); ++i) {
    const Vec3 q = t.rotation * reading.points[i] + t.translation;
    const int nearest =
        oracles::brute_force_nearest(reference.points, q, max_dist);
    if (nearest < 0) continue;
    const Correspondence& c = matches.pairs[expected_count];
    CHECK(c.index_reading == static_cast<int>(i));
    CHECK(c.index_reference == nearest);
    ++expected_count;
  }
  CHECK(matches.size() == expected_count);
}

TEST_CASE("match throws TooFewMatches when starved") {
  PointCloud reference;
  reference.frame = "M";
  for (int i = 0; i < 10; ++i) {
    reference.points.emplace_back(i * 10.0, 0.0, 0.0);
    reference.normals.push_back(Vec3(0, 0, 1));
  }
  PointCloud reading;
  reading.frame = "L";
  for (int i = 0; i < 10; ++i) {
    reading.points.emplace_back(i * 10.0, 100.0, 0.0);  // far away
  }
  CHECK_THROWS_AS(match(reading, reference, RigidTransform::identity(), 0.5),
                  TooFewMatches);
}

TEST_CASE("increasing max_dist never decreases the match count") {
  std::mt19937 rng(59);
  PointCloud reference = random_cloud(400, rng);
  reference.normals.resize(reference.size());
  for (Vec3& n : reference.normals) n = oracles::random_unit(rng);
  const PointCloud reading = random_cloud(400, rng);
  std::size_t previous = 0;
  for (double max_dist : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const CorrespondenceSet matches =
        match(reading, reference, RigidTransform::identity(), max_dist);
    CHECK(matches.size() >= previous);
    previous = matches.size();
  }
}

TEST_CASE("to_lidar_frame") {
  std::mt19937 rng(61);
  CorrespondenceSet matches = oracles::random_pairs(20, rng, 0.05, "M");

  SUBCASE("identity transform leaves pairs unchanged") {
    const CorrespondenceSet out =
        to_lidar_frame(matches, RigidTransform::identity());
    CHECK(out.frame == "L");
    CHECK((out.pairs[3].p - matches.pairs[3].p).norm() == 0.0);
  }

  SUBCASE("pure rotation preserves pair distances") {
    RigidTransform t;
    t.rotation = exp_rotvec(Vec3(0.2, 0.4, -0.3));
    const CorrespondenceSet out = to_lidar_frame(matches, t);
    for (std::size_t i = 0; i < matches.size(); ++i) {
      CHECK(std::abs((out.pairs[i].p - out.pairs[i].q).norm() -
                     matches.pairs[i].distance) < 1e-9);
    }
  }

  SUBCASE("map -> lidar -> map round trip") {
    RigidTransform t;
    t.rotation = exp_rotvec(Vec3(0.5, -0.1, 0.2));
    t.translation = Vec3(12, -7, 3);
    const CorrespondenceSet lidar = to_lidar_frame(matches, t);
    CHECK(lidar.frame == "L");
    for (std::size_t i = 0; i < matches.size(); ++i) {
      const Vec3 back = t.rotation * lidar.pairs[i].p + t.translation;
      CHECK((back - matches.pairs[i].p).norm() < 1e-9);
    }
  }
}

TEST_CASE("rotational contributions ignore a common map-frame offset") {
  // Shifting both clouds (and so the sensor pose) by one map-frame vector
  // must not change the lidar-frame rotational contributions.
  std::mt19937 rng(67);
  CorrespondenceSet map_pairs = oracles::random_pairs(200, rng, 0.02, "M");
  RigidTransform pose;
  pose.rotation = exp_rotvec(Vec3(0.1, 0.0, 0.7));
  pose.translation = Vec3(3, 4, 0);
  for (Correspondence& c : map_pairs.pairs) {
    c.p = pose.rotation * c.p + pose.translation;
    c.q = pose.rotation * c.q + pose.translation;
    c.n = pose.rotation * c.n;
  }

  const Vec3 offset(25.0, -13.0, 4.0);
  CorrespondenceSet shifted = map_pairs;
  for (Correspondence& c : shifted.pairs) {
    c.p += offset;
    c.q += offset;
  }
  RigidTransform shifted_pose = pose;
  shifted_pose.translation += offset;

  const CorrespondenceSet lidar_a = to_lidar_frame(map_pairs, pose);
  const CorrespondenceSet lidar_b = to_lidar_frame(shifted, shifted_pose);

  const LocalizabilityParams params;
  const EigenBasis basis_a = eigen_analyze(linearize(lidar_a));
  const EigenBasis basis_b = eigen_analyze(linearize(lidar_b));
  const ContributionTables ta = compute_contributions(lidar_a, basis_a, params);
  const ContributionTables tb = compute_contributions(lidar_b, basis_b, params);
  for (int j = 0; j < 3; ++j) {
    CHECK(ta.l_combined[j] == doctest::Approx(tb.l_combined[j]).epsilon(1e-9));
    CHECK(ta.l_strong[j] == doctest::Approx(tb.l_strong[j]).epsilon(1e-9));
  }
}
