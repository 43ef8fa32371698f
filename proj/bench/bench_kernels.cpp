// Serial vs OpenMP timing for the data-parallel kernels.
#include <benchmark/benchmark.h>

#include <random>

#include "xicp/correspondence.hpp"
#include "xicp/localizability.hpp"
#include "xicp/metrics.hpp"
#include "xicp/problem.hpp"

using namespace xicp;

namespace {

Vec3 random_unit(std::mt19937& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec3 v(normal(rng), normal(rng), normal(rng));
  while (v.norm() < 1e-6) {
    v = Vec3(normal(rng), normal(rng), normal(rng));
  }
  return v.normalized();
}

PointCloud make_cloud(int n, unsigned seed, bool with_normals) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coord(-15.0, 15.0);
  PointCloud cloud;
  cloud.frame = "M";
  for (int i = 0; i < n; ++i) {
    cloud.points.emplace_back(coord(rng), coord(rng), coord(rng));
    if (with_normals) {
      cloud.normals.push_back(random_unit(rng));
    }
  }
  return cloud;
}

CorrespondenceSet make_pairs(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> radius(1.0, 12.0);
  CorrespondenceSet set;
  set.frame = "L";
  for (int i = 0; i < n; ++i) {
    Correspondence c;
    c.p = random_unit(rng) * radius(rng);
    c.n = random_unit(rng);
    c.q = c.p + 0.02 * random_unit(rng);
    set.pairs.push_back(c);
  }
  return set;
}

Exec exec_of(const benchmark::State& state) {
  return state.range(1) == 0 ? Exec::Serial : Exec::Parallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(1) == 0 ? "serial" : "openmp");
}

void bm_transform(benchmark::State& state) {
  const PointCloud cloud =
      make_cloud(static_cast<int>(state.range(0)), 1, true);
  RigidTransform t;
  t.rotation = exp_rotvec(Vec3(0.2, -0.4, 0.6));
  t.translation = Vec3(1, 2, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_transform(t, cloud, "M", exec_of(state)));
  }
  label(state);
}

void bm_match(benchmark::State& state) {
  const PointCloud reference =
      make_cloud(static_cast<int>(state.range(0)) * 4, 2, true);
  const PointCloud reading =
      make_cloud(static_cast<int>(state.range(0)), 3, false);
  const KdTree tree(reference.points);
  for (auto _ : state) {
    benchmark::DoNotOptimize(match(reading, reference, tree,
                                   RigidTransform::identity(), 5.0,
                                   exec_of(state)));
  }
  label(state);
}

void bm_normals(benchmark::State& state) {
  const PointCloud cloud =
      make_cloud(static_cast<int>(state.range(0)), 4, false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        estimate_normals(cloud, 10, Vec3::Zero(), exec_of(state)));
  }
  label(state);
}

void bm_linearize(benchmark::State& state) {
  const CorrespondenceSet pairs =
      make_pairs(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(linearize(pairs, exec_of(state)));
  }
  label(state);
}

void bm_contributions(benchmark::State& state) {
  const CorrespondenceSet pairs =
      make_pairs(static_cast<int>(state.range(0)), 6);
  const EigenBasis basis = eigen_analyze(linearize(pairs));
  const LocalizabilityParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        compute_contributions(pairs, basis, params, exec_of(state)));
  }
  label(state);
}

void bm_map_error(benchmark::State& state) {
  const PointCloud truth =
      make_cloud(static_cast<int>(state.range(0)) * 4, 7, false);
  const PointCloud built =
      make_cloud(static_cast<int>(state.range(0)), 8, false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(map_p2p_error(built, truth, exec_of(state)));
  }
  label(state);
}

void add_sizes(benchmark::internal::Benchmark* bench) {
  for (int size : {4096, 16384, 65536}) {
    bench->Args({size, 0});
    bench->Args({size, 1});
  }
  bench->Unit(benchmark::kMillisecond);
}

BENCHMARK(bm_transform)->Apply(add_sizes);
BENCHMARK(bm_match)->Apply(add_sizes);
BENCHMARK(bm_normals)->Apply(add_sizes);
BENCHMARK(bm_linearize)->Apply(add_sizes);
BENCHMARK(bm_contributions)->Apply(add_sizes);
BENCHMARK(bm_map_error)->Apply(add_sizes);

}  // namespace

BENCHMARK_MAIN();
