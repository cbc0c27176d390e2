#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "fowt/design_optimizer.hpp"
#include "fowt/env_sampler.hpp"
#include "fowt/fatigue_analysis.hpp"
#include "fowt/fatigue_estimator.hpp"
#include "fowt/response_provider.hpp"
#include "fowt/spectral_analysis.hpp"
#include "fowt/tower_model.hpp"

using namespace fowt;

namespace {

std::vector<double> noise(std::size_t n, double sigma) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> d(0.0, sigma);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

void BM_rainflow(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1e7);
  for (auto _ : state) benchmark::DoNotOptimize(fatigue::rainflow(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_rainflow)->Arg(1 << 12)->Arg(1 << 16);

void BM_welch_psd(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(spectral::welch_psd(x, 20.0, 4096));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_welch_psd)->Arg(1 << 14)->Arg(1 << 17);

void BM_sample_states(benchmark::State& state) {
  const env::SamplingPlan plan;
  for (auto _ : state) benchmark::DoNotOptimize(env::sample_states(plan));
}
BENCHMARK(BM_sample_states)->Unit(benchmark::kMillisecond);

void BM_first_natural_frequency(benchmark::State& state) {
  const auto g = tower::reference_geometry();
  for (auto _ : state)
    benchmark::DoNotOptimize(tower::first_natural_frequency(g, tower::Material{}, tower::RnaProperties{}));
}
BENCHMARK(BM_first_natural_frequency);

void BM_design_evaluate(benchmark::State& state) {
  const auto g = tower::reference_geometry();
  design::DesignContext ctx;
  ctx.calibration = estimator::calibrate(g, {g.midpoint_z(), std::vector<double>(g.sections(), 0.5)});
  ctx.heights = g.h;
  const auto x = design::DesignVector::from_geometry(g);
  for (auto _ : state) benchmark::DoNotOptimize(design::evaluate(x, ctx));
}
BENCHMARK(BM_design_evaluate);

void BM_simulate_response(benchmark::State& state) {
  env::EnvironmentalState s;
  s.id = 1;
  s.u = 11.5;
  s.seed = 1;
  s.sigma_w = 1.8;
  s.hs = 2.0;
  s.tp = 8.0;
  s.weight = 1.0;
  const response::SimulationConfig config;
  const auto g = tower::reference_geometry();
  for (auto _ : state)
    benchmark::DoNotOptimize(response::simulate_response(s, g, response::RotorModel{}, config));
}
BENCHMARK(BM_simulate_response)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
