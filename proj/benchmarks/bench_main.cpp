#include <benchmark/benchmark.h>

#include <cmath>

#include "wvlab/maxmod.hpp"
#include "wvlab/phases.hpp"
#include "wvlab/series.hpp"
#include "wvlab/wv_stats.hpp"

using namespace wvlab;

namespace {

const SeriesOptions kWide{46.0, 1'000'000'000};

void BM_MaxTerm(benchmark::State& state) {
  const auto seq = CoefficientSequence::sqrt_exp();
  const Radius r = Radius::from_s(std::pow(10.0, -static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(max_term(seq, r, kWide));
}
BENCHMARK(BM_MaxTerm)->DenseRange(1, 4);

void BM_GrowthProfile(benchmark::State& state) {
  const auto seq = CoefficientSequence::sqrt_exp();
  const Radius r = Radius::from_s(std::pow(10.0, -static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(growth_profile(seq, r, kWide));
}
BENCHMARK(BM_GrowthProfile)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_PhaseAnglesDyadic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto theta = gen_geometric(2.0, n);
  auto rng = trial_rng(1, 0);
  const auto u = sample_u(rng, static_cast<unsigned>(n + 128));
  for (auto _ : state) benchmark::DoNotOptimize(phase_angles(theta, u, 0, n - 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_PhaseAnglesDyadic)->Range(1 << 10, 1 << 16);

void BM_PhaseAnglesExplicit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto theta = gen_geometric(1.5, n);
  auto rng = trial_rng(1, 0);
  const auto u = sample_u(rng, static_cast<unsigned>(n + 128));
  for (auto _ : state) benchmark::DoNotOptimize(phase_angles(theta, u, 0, n - 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_PhaseAnglesExplicit)->Range(1 << 8, 1 << 12);

// s = 10^-k/2 for k = 2..6
void BM_MaxModulus(benchmark::State& state) {
  const auto seq = CoefficientSequence::sqrt_exp();
  const Radius r = Radius::from_s(std::pow(10.0, -static_cast<double>(state.range(0)) / 2.0));
  const MaxModulusOptions opts{kWide};
  const auto trunc = truncation_index(seq, r, kWide.margin_nats, kWide.n_cap);
  const auto theta = gen_geometric(2.0, trunc + 1);
  auto rng = trial_rng(7, 0);
  const auto u = sample_u(rng, static_cast<unsigned>(trunc + 256));
  MaxModulusEngine engine;
  for (auto _ : state) benchmark::DoNotOptimize(engine.max_modulus(seq, theta, u, r, opts));
  state.counters["trunc"] = static_cast<double>(trunc);
}
BENCHMARK(BM_MaxModulus)->DenseRange(2, 6)->Unit(benchmark::kMillisecond);

void BM_HMeasureClosedForm(benchmark::State& state) {
  const auto h = WeightFunction::log_measure();
  const Interval iv{Radius::from_s(0.1), Radius::from_s(0.001)};
  for (auto _ : state) benchmark::DoNotOptimize(h_measure(iv, h));
}
BENCHMARK(BM_HMeasureClosedForm);

void BM_HMeasureQuadrature(benchmark::State& state) {
  const auto h = WeightFunction::custom("s^-1.5", [](Radius r) { return -1.5 * std::log(r.s()); });
  const Interval iv{Radius::from_s(0.1), Radius::from_s(0.001)};
  for (auto _ : state) benchmark::DoNotOptimize(h_measure(iv, h));
}
BENCHMARK(BM_HMeasureQuadrature);

}  // namespace
BENCHMARK_MAIN();
