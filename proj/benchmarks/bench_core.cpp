#include <benchmark/benchmark.h>

#include "twoweight/constants.hpp"
#include "twoweight/energy.hpp"
#include "twoweight/runner.hpp"
#include "twoweight/transform.hpp"
#include "twoweight/verify.hpp"

namespace {

tw::Scenario scenario(int atoms, double alpha) {
  tw::GeneratorConfig g;
  g.alpha = alpha;
  g.atoms_sigma = atoms;
  g.atoms_omega = atoms;
  return tw::canonicalize_line(tw::generate_scenario(1, g));
}

void BM_ApplyTransform(benchmark::State& state) {
  const auto s = scenario(static_cast<int>(state.range(0)), 0.5);
  const std::vector<double> f(s.sigma.size(), 1.0);
  const auto pts = s.omega.locations();
  const auto t = s.effective_truncation();
  for (auto _ : state) benchmark::DoNotOptimize(tw::apply_transform(f, s.sigma, pts, t, s.kernel()));
}
BENCHMARK(BM_ApplyTransform)->Arg(10)->Arg(40)->Arg(160);

void BM_OpNorm(benchmark::State& state) {
  const auto s = scenario(static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(tw::op_norm(s));
}
BENCHMARK(BM_OpNorm)->Arg(10)->Arg(40)->Arg(160);

void BM_TestingConstant(benchmark::State& state) {
  const auto s = scenario(static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(tw::testing_constant(s, tw::Direction::Forward));
}
BENCHMARK(BM_TestingConstant)->Arg(10)->Arg(40);

void BM_EnergyConstant(benchmark::State& state) {
  const auto s = scenario(static_cast<int>(state.range(0)), 1.0);
  const tw::PartitionStrategy ps;
  for (auto _ : state) benchmark::DoNotOptimize(tw::energy_constant(s, tw::Direction::Forward, ps));
}
BENCHMARK(BM_EnergyConstant)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_ProjectionNorms(benchmark::State& state) {
  const auto s = scenario(static_cast<int>(state.range(0)), 0.0);
  const auto grids = s.build_grids();
  const tw::Cube root = tw::Cube::root_of(grids[0]);
  for (auto _ : state) benchmark::DoNotOptimize(tw::projection_norms(root, s.sigma, s.goodness));
}
BENCHMARK(BM_ProjectionNorms)->Arg(16)->Arg(64);

void BM_MeasureScenario(benchmark::State& state) {
  const auto s = scenario(static_cast<int>(state.range(0)), 0.5);
  const tw::VerifyOptions opt;
  for (auto _ : state) benchmark::DoNotOptimize(tw::measure_scenario(s, 0, opt));
}
BENCHMARK(BM_MeasureScenario)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
