#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dualsrc/errors.hpp"
#include "dualsrc/simulator.hpp"

using namespace dualsrc;

namespace {

SimulationConfig quick(std::uint64_t seed = 7) {
  SimulationConfig c;
  c.seed = seed;
  c.rel_halfwidth_target = 0.02;
  c.max_batches = 400;
  return c;
}

Instance nb(int l_r, double p = 9, double mean = 20, double cov = 0.5) {
  return Instance::make(p, 1, 3, 0, 0, l_r, DemandModel::make(DemandFamily::NegativeBinomial, mean, cov));
}

}  // namespace

TEST(BatchHalfwidth, StudentT) {
  // t_{0.975, 4} = 2.776445; sd of {1..5} = sqrt(2.5).
  EXPECT_NEAR(batch_halfwidth({1, 2, 3, 4, 5}, 0.95), 2.776445 * std::sqrt(2.5) / std::sqrt(5.0), 1e-5);
  EXPECT_EQ(batch_halfwidth({3, 3, 3}, 0.95), 0);
  EXPECT_TRUE(std::isinf(batch_halfwidth({3}, 0.95)));
}

TEST(SimulationConfig, Validation) {
  SimulationConfig c;
  c.min_batches = 1;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.max_batches = 5;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.ci_level = 1;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.batch_length = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  const auto inst = nb(3);
  EXPECT_EQ(SimulationConfig{}.warmup_for(inst), 80);
  EXPECT_EQ(SimulationConfig{}.batch_length_for(inst), 800);
}

TEST(Simulate, DeterministicSteadyState) {
  const auto inst = Instance::make(9, 1, 3, 0.5, 0, 2, DemandModel::make(DemandFamily::Deterministic, 50, {}));
  const auto e = simulate(PolicyParams::tbs(-1000, 50), inst, SimulationConfig{});
  // Two periods without arrivals leave a steady backlog of 100.
  EXPECT_DOUBLE_EQ(e.mean, 0.5 * 50 + 9 * 100);
  EXPECT_EQ(e.halfwidth, 0);
  EXPECT_TRUE(e.converged);
  EXPECT_EQ(e.batches, SimulationConfig{}.min_batches);
  EXPECT_EQ(e.order_variance_regular, 0);
  EXPECT_EQ(e.mean_expedited_order, 0);
}

TEST(Simulate, Deterministic) {
  const auto inst = nb(3);
  const auto a = simulate(PolicyParams::peip(40, 6), inst, quick());
  const auto b = simulate(PolicyParams::peip(40, 6), inst, quick());
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.halfwidth, b.halfwidth);
  EXPECT_EQ(a.batch_means, b.batch_means);
  const auto c = simulate(PolicyParams::peip(40, 6), inst, quick(8));
  EXPECT_NE(a.mean, c.mean);
}

TEST(Simulate, SingleExpeditedClosedForm) {
  const auto inst = nb(2, 9, 20, 0.5);
  const double S = 27;
  double closed = inst.c_e * inst.demand.pmf_mean();
  for (int k = inst.demand.support_min(); k <= inst.demand.support_max(); ++k)
    closed += inst.demand.pmf_at(k) * (inst.h * std::max(S - k, 0.0) + inst.p * std::max(k - S, 0.0));
  auto cfg = quick();
  cfg.rel_halfwidth_target = 0.005;
  const auto e = simulate(PolicyParams::single_expedited(S), inst, cfg);
  EXPECT_TRUE(e.converged);
  EXPECT_NEAR(e.mean, closed, 3 * e.halfwidth);
  EXPECT_EQ(e.mean_regular_order, 0);
}

TEST(Simulate, ComponentsSumToMean) {
  const auto e = simulate(PolicyParams::di(30, 40), nb(3), quick());
  EXPECT_NEAR(e.components.total(), e.mean, 1e-9);
  EXPECT_GT(e.components.expedite, 0);
  EXPECT_GT(e.components.holding, 0);
  EXPECT_GT(e.components.backlog, 0);
}

TEST(Simulate, TraceRows) {
  auto cfg = quick();
  cfg.warmup_periods = 5;
  cfg.batch_length = 10;
  cfg.min_batches = 2;
  cfg.max_batches = 2;
  std::ostringstream out;
  simulate(PolicyParams::tbs(25, 20), nb(2), cfg, &out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, trace_csv_header());
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 25);
}

TEST(Paired, SinglePolicyEqualsSimulate) {
  const auto inst = nb(3);
  const auto a = simulate(PolicyParams::tbs(40, 19), inst, quick());
  const auto b = paired_evaluate({PolicyParams::tbs(40, 19)}, inst, quick());
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(a.mean, b[0].mean);
  EXPECT_EQ(a.batch_means, b[0].batch_means);
}

TEST(Paired, CommonDemandPath) {
  // Two runs of one policy inside a paired evaluation see the same demands.
  const auto inst = nb(3);
  const auto r = paired_evaluate({PolicyParams::di(40, 30), PolicyParams::tbs(40, 19),
                                  PolicyParams::di(40, 30)},
                                 inst, quick());
  EXPECT_EQ(r[0].batch_means, r[2].batch_means);
  EXPECT_EQ(r[0].batches, r[1].batches);
  const auto d = paired_difference(r[0], r[2], 0.95);
  EXPECT_EQ(d.mean, 0);
  EXPECT_EQ(d.halfwidth, 0);
  // Demand draws do not depend on the policy, so expected-demand terms agree.
  EXPECT_NEAR(r[0].mean_regular_order + r[0].mean_expedited_order,
              r[1].mean_regular_order + r[1].mean_expedited_order, 0.5);
}

TEST(Paired, DifferenceHalfwidthShrinks) {
  const auto inst = nb(3);
  const auto r = paired_evaluate({PolicyParams::di(40, 30), PolicyParams::di(40, 31)}, inst, quick());
  const auto d = paired_difference(r[0], r[1], 0.95);
  EXPECT_LT(d.halfwidth, r[0].halfwidth);
}

TEST(Overshoot, PeipMeanMatchesTarget) {
  const auto inst = nb(3, 9, 20, 0.75);
  auto cfg = quick();
  cfg.rel_halfwidth_target = 0.01;
  const auto s = overshoot_distribution(PolicyParams::peip(0, 5), inst, cfg);
  EXPECT_NEAR(s.mean, 5, 0.1);
  EXPECT_GE(s.law.min_value(), 0);
  EXPECT_EQ(s.attainability_violations, 0);
  EXPECT_NEAR(s.law.mean(), s.mean, 1e-6);
}

TEST(Overshoot, TbsRegularOrderConstant) {
  const auto s = overshoot_distribution(PolicyParams::tbs(123, 15), nb(2), quick());
  EXPECT_EQ(s.mean_regular_order, 15);
  EXPECT_EQ(s.order_variance_regular, 0);
  EXPECT_GE(s.law.min_value(), 0);
  // r < E[D] makes the overshoot mostly zero.
  EXPECT_GT(s.law.mass_at(0), 0.5);
}

TEST(Overshoot, ExpeditedLevelIrrelevant) {
  const auto a = overshoot_distribution(PolicyParams::di(0, 30), nb(3), quick());
  const auto b = overshoot_distribution(PolicyParams::di(77, 30), nb(3), quick());
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_THROW(overshoot_distribution(PolicyParams::single_regular(10), nb(3), quick()),
               ValidationError);
}
