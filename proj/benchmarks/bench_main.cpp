#include <benchmark/benchmark.h>

#include "eqlab/dynamics.hpp"
#include "eqlab/henon.hpp"
#include "eqlab/parser.hpp"
#include "eqlab/potential.hpp"
#include "eqlab/roots.hpp"
#include "eqlab/sections.hpp"

using namespace eqlab;

static void BM_SphereLogIntegral(benchmark::State& state) {
  Rng rng(1);
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sphere_log_modulus_integral(k, 10000, rng));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SphereLogIntegral)->Arg(1)->Arg(3);

static void BM_KostlanRoots(benchmark::State& state) {
  Rng rng(2);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto zs = zero_set(sample_section({1, n, 1, Field::Complex}, rng), 1, rng);
    benchmark::DoNotOptimize(zs.points().size());
  }
}
BENCHMARK(BM_KostlanRoots)->Arg(25)->Arg(100)->Arg(200);

static void BM_CommonZeros(benchmark::State& state) {
  Rng rng(3);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto zs = zero_set(sample_section({2, n, 2, Field::Complex}, rng), 2, rng);
    benchmark::DoNotOptimize(zs.points().size());
  }
}
BENCHMARK(BM_CommonZeros)->Arg(3)->Arg(5);

static void BM_BackwardOrbit(benchmark::State& state) {
  const RationalSelfMap f(parse_map({"x0^2 - x1^2", "x1^2"}, 2));
  const ProjectivePoint x0{Complex(0.6, 0.37), 1.0};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto s = backward_orbit_sample({f}, x0, static_cast<std::size_t>(state.range(0)), 1000, Rng(++seed));
    benchmark::DoNotOptimize(s.measure.size());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_BackwardOrbit)->Arg(10)->Arg(25);

static void BM_HenonCloud(benchmark::State& state) {
  const auto f = build_regular_automorphism("y^2 - 1.4", Complex(0.3, 0.0));
  Rng rng(4);
  const LinePair pair = random_line_pair(rng);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(line_intersection_cloud(f, n, n, pair).raw_count);
}
BENCHMARK(BM_HenonCloud)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_EstimateSup(benchmark::State& state) {
  Rng rng(5);
  const QpshWitness w(sample_kostlan_form(2, static_cast<int>(state.range(0)), Field::Complex, rng));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_sup(w, whole_space(2), 2000, rng).sup);
}
BENCHMARK(BM_EstimateSup)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
