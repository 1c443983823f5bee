#include <benchmark/benchmark.h>

#include <vector>

#include "dualsrc/projection.hpp"

using namespace dualsrc;

namespace {

// A fixed batch of regular-decision states with l - 1 incoming orders.
std::vector<RegularDecisionState> states(int l, double mean, int n) {
  RandomStream rng(3);
  std::vector<RegularDecisionState> out(static_cast<std::size_t>(n));
  for (auto& r : out) {
    r.overshoot = 0.4 * mean * rng.uniform();
    for (int i = 0; i < l - 1; ++i) r.incoming.push_back(mean * (0.6 + 0.8 * rng.uniform()));
  }
  return out;
}

void BM_ReferenceProjection(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const auto d = DemandModel::make(DemandFamily::NegativeBinomial, 50, 0.25);
  const auto batch = states(l, 50, 16);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_overshoot(batch[i++ % batch.size()], 50, d, l));
  }
}
BENCHMARK(BM_ReferenceProjection)->DenseRange(2, 6, 2);

void BM_FastSolve(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const bool snap = state.range(1) != 0;
  const auto d = DemandModel::make(DemandFamily::NegativeBinomial, 50, 0.25);
  OvershootProjector p(d, {.snap_offsets = snap});
  const auto batch = states(l, 50, 64);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(p.solve(batch[i++ % batch.size()], 20).order);
  state.SetLabel(snap ? "snap" : "exact");
}
BENCHMARK(BM_FastSolve)->ArgsProduct({{2, 6, 10}, {0, 1}});

// High-variance demand picks a coarser lattice automatically.
void BM_FastSolveCoarse(benchmark::State& state) {
  const auto d = DemandModel::make(DemandFamily::NegativeBinomial, 50, state.range(0) / 100.0);
  OvershootProjector p(d);
  const auto batch = states(4, 50, 64);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(p.solve(batch[i++ % batch.size()], 20).order);
  state.counters["width"] = p.lattice_width();
}
BENCHMARK(BM_FastSolveCoarse)->Arg(25)->Arg(100)->Arg(200);

}  // namespace
