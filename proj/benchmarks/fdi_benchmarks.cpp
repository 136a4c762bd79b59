#include <benchmark/benchmark.h>

#include <random>

#include <fdi/bundled.hpp>
#include <fdi/detection.hpp>
#include <fdi/isolation.hpp>
#include <fdi/selection.hpp>
#include <fdi/structural.hpp>

namespace {

using namespace fdi;

Fsm random_fsm(std::size_t residuals, std::size_t faults, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(0.4);
  std::vector<Id> r, f;
  std::vector<SignatureRow> rows(residuals, SignatureRow(faults));
  for (std::size_t i = 0; i < residuals; ++i) r.push_back("r" + std::to_string(i));
  for (std::size_t j = 0; j < faults; ++j) f.push_back("f" + std::to_string(j));
  for (auto& row : rows) {
    for (std::size_t j = 0; j < faults; ++j) row[j] = bit(rng);
  }
  return Fsm(r, f, rows);
}

void BM_EngineFim(benchmark::State& state) {
  const auto fsm = io::load_engine_fsm();
  for (auto _ : state) benchmark::DoNotOptimize(isolated_faults(fsm_to_fim(fsm)));
}
BENCHMARK(BM_EngineFim);

void BM_RandomFim(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto fsm = random_fsm(n, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fsm_to_fim(fsm));
}
BENCHMARK(BM_RandomFim)->RangeMultiplier(4)->Range(16, 256);

void BM_EngineGreedy(benchmark::State& state) {
  const auto engine = io::Bundle::locate().engine_fsm();
  for (auto _ : state) benchmark::DoNotOptimize(select_minimal(engine.originals(), engine.additional()));
}
BENCHMARK(BM_EngineGreedy);

void BM_EngineExact(benchmark::State& state) {
  const auto engine = io::Bundle::locate().engine_fsm();
  for (auto _ : state) benchmark::DoNotOptimize(select_exact(engine.originals(), engine.additional()));
}
BENCHMARK(BM_EngineExact)->Unit(benchmark::kMillisecond);

void BM_EnumerateChain(benchmark::State& state) {
  const auto model = chain_model(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_candidates(model));
}
BENCHMARK(BM_EnumerateChain)->DenseRange(3, 9, 2)->Unit(benchmark::kMillisecond);

void BM_ExampleCampaign(benchmark::State& state) {
  const auto scenario = io::Bundle::locate().example_scenario();
  std::vector<ResidualSpec> specs;
  for (const auto& r : scenario.residuals) {
    specs.push_back(std::get<ResidualSpec>(derive_residual(*scenario.model, r.target, r.inputs)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_campaign(scenario.campaign, specs, scenario.detection));
}
BENCHMARK(BM_ExampleCampaign)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
