#include <benchmark/benchmark.h>

#include "dualsrc/optimizer.hpp"
#include "dualsrc/simulator.hpp"

using namespace dualsrc;

namespace {

Instance table_instance(int l) {
  return Instance::make(19, 1, 5, 0, 0, l, DemandModel::make(DemandFamily::NegativeBinomial, 50, 0.25));
}

// Periods per second of one trajectory, fixed run length.
void BM_Simulate(benchmark::State& state) {
  const auto family = static_cast<PolicyFamily>(state.range(0));
  const Instance inst = table_instance(static_cast<int>(state.range(1)));
  PolicyParams p;
  switch (family) {
    case PolicyFamily::Peip: p = PolicyParams::peip(58, 24); break;
    case PolicyFamily::Tbs: p = PolicyParams::tbs(66, 46.65); break;
    default: p = PolicyParams::di(58, 80); break;
  }
  SimulationConfig cfg;
  cfg.warmup_periods = 100;
  cfg.batch_length = 1000;
  cfg.min_batches = 10;
  cfg.max_batches = 10;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(p, inst, cfg).mean);
  state.SetItemsProcessed(state.iterations() * 10'100);
  state.SetLabel(to_string(family));
}
BENCHMARK(BM_Simulate)
    ->ArgsProduct({{static_cast<int>(PolicyFamily::Peip), static_cast<int>(PolicyFamily::Tbs),
                    static_cast<int>(PolicyFamily::Di)},
                   {2, 6}})
    ->Unit(benchmark::kMillisecond);

void BM_NewsvendorLevel(benchmark::State& state) {
  const Instance inst = table_instance(2);
  SimulationConfig cfg;
  cfg.max_batches = 20;
  const auto o = overshoot_distribution(PolicyParams::peip(0, 24), inst, cfg);
  for (auto _ : state)
    benchmark::DoNotOptimize(newsvendor_level(o.law, inst.demand, inst.l_e, inst.p, inst.h));
  state.counters["atoms"] = static_cast<double>(o.law.size());
}
BENCHMARK(BM_NewsvendorLevel)->Unit(benchmark::kMicrosecond);

}  // namespace
