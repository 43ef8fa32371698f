// Scratch calibration probe; not part of the build.
#include <cstdio>

#include "xicp/correspondence.hpp"
#include "xicp/localizability.hpp"
#include "xicp/problem.hpp"
#include "xicp/simulator.hpp"

using namespace xicp;

namespace {

CorrespondenceSet self_match(const PointCloud& scan) {
  CorrespondenceSet set;
  set.frame = scan.frame;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    Correspondence c;
    c.p = scan.points[i];
    c.q = scan.points[i];
    c.n = scan.normals[i];
    c.index_reading = c.index_reference = static_cast<int>(i);
    set.pairs.push_back(c);
  }
  return set;
}

void report(const char* tag, const PointCloud& world,
            const RigidTransform& pose, double range, int cap) {
  NoiseSpec noise;
  noise.range_noise = 0.01;
  const PointCloud scan = simulate_scan(world, pose, range, noise, cap, 11);
  const CorrespondenceSet matches = self_match(scan);
  const LinearizedProblem problem = linearize(matches);
  const EigenBasis basis = eigen_analyze(problem);
  const LocalizabilityParams params;
  const ContributionTables tables =
      compute_contributions(matches, basis, params);
  const LocalizabilityReport rep = categorize(basis, tables, params);
  std::printf("%-28s N=%5zu\n", tag, scan.size());
  std::printf("  eig_r %10.1f %10.1f %10.1f | eig_t %10.1f %10.1f %10.1f\n",
              basis.sigma_r[0], basis.sigma_r[1], basis.sigma_r[2],
              basis.sigma_t[0], basis.sigma_t[1], basis.sigma_t[2]);
  std::printf("  L_c   %10.1f %10.1f %10.1f |       %10.1f %10.1f %10.1f\n",
              tables.l_combined[0], tables.l_combined[1], tables.l_combined[2],
              tables.l_combined[3], tables.l_combined[4],
              tables.l_combined[5]);
  std::printf("  L_s   %10.1f %10.1f %10.1f |       %10.1f %10.1f %10.1f\n",
              tables.l_strong[0], tables.l_strong[1], tables.l_strong[2],
              tables.l_strong[3], tables.l_strong[4], tables.l_strong[5]);
  std::printf("  eta   %10s %10s %10s |       %10s %10s %10s\n",
              to_string(rep.eta[0]), to_string(rep.eta[1]),
              to_string(rep.eta[2]), to_string(rep.eta[3]),
              to_string(rep.eta[4]), to_string(rep.eta[5]));
}

RigidTransform pose_at(const Vec3& p, double yaw) {
  RigidTransform pose;
  pose.rotation = exp_rotvec(Vec3(0, 0, yaw));
  pose.translation = p;
  return pose;
}

}  // namespace

int main() {
  {
    WorldSpec spec;
    spec.kind = WorldKind::Tunnel;
    spec.tunnel_length = 70.0;
    const PointCloud world = build_world(spec);
    const double yaw = world_yaw_offset(spec.kind);
    const Vec3 axis = exp_rotvec(Vec3(0, 0, yaw)) * Vec3(1, 0, 0);
    report("tunnel center cap4096", world,
           pose_at(axis * 35.0 + Vec3(0, 0, 1.0), yaw), 15.0, 4096);
  }
  {
    WorldSpec spec;
    spec.kind = WorldKind::CylinderRoom;
    const PointCloud world = build_world(spec);
    for (double d : {0.0, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0}) {
      char tag[64];
      std::snprintf(tag, sizeof(tag), "cylinder d=%.1f cap1024 r9", d);
      report(tag, world, pose_at(Vec3(d, 0, 1.2), 0.4), 9.0, 1024);
    }
  }
  {
    WorldSpec spec;
    spec.kind = WorldKind::CombinedCorridorOpen;
    const PointCloud world = build_world(spec);
    const double yaw = world_yaw_offset(spec.kind);
    const Mat3 r = exp_rotvec(Vec3(0, 0, yaw));
    report("combined corridor s=20", world,
           pose_at(r * Vec3(20.0, 0, 1.0), yaw), 15.0, 4096);
    report("combined transition s=45", world,
           pose_at(r * Vec3(45.0, 0, 1.0), yaw), 15.0, 4096);
    report("combined open s=60", world, pose_at(r * Vec3(60.0, 0, 1.0), yaw),
           15.0, 4096);
  }
  {
    WorldSpec spec;
    spec.kind = WorldKind::Plane;
    const PointCloud world = build_world(spec);
    report("plane center cap4096", world, pose_at(Vec3(0, 0, 1.5), 0.0), 15.0,
           4096);
  }
  {
    WorldSpec spec;
    spec.kind = WorldKind::BoxRoom;
    const PointCloud world = build_world(spec);
    report("box center cap3000", world, pose_at(Vec3(0, 0, 1.2), 0.0), 12.0,
           3000);
  }
  return 0;
}
