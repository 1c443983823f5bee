#include <gtest/gtest.h>

#include <cmath>

#include "dualsrc/bounds.hpp"
#include "dualsrc/errors.hpp"

using namespace dualsrc;

namespace {

// min over integer S of h E[(S - D)^+] + p E[(D - S)^+] for D the (l+1)-period demand.
double brute_base_stock(double p, double h, int l, const DemandModel& d) {
  const auto pmf = convolve_pmf(d, l + 1);
  double best = INFINITY;
  for (int s = pmf.offset - 1; s <= pmf.max_value() + 1; ++s) {
    double c = 0;
    for (std::size_t j = 0; j < pmf.mass.size(); ++j) {
      const double v = pmf.offset + static_cast<double>(j);
      c += pmf.mass[j] * (h * std::max(s - v, 0.0) + p * std::max(v - s, 0.0));
    }
    best = std::min(best, c);
  }
  return best;
}

}  // namespace

TEST(BaseStock, Examples) {
  const auto det = DemandModel::make(DemandFamily::Deterministic, 3, {});
  const auto a = backlog_base_stock_cost(9, 1, 2, det);
  EXPECT_EQ(a.S_star, 9);
  EXPECT_EQ(a.cost, 0);
  const auto b = backlog_base_stock_cost(1, 1, 0, DemandModel::empirical({0.5, 0.5}));
  EXPECT_NEAR(b.cost, 0.5, 1e-15);
  const auto c = backlog_base_stock_cost(9, 1, 0, DemandModel::empirical({0.2, 0.5, 0.3}));
  EXPECT_EQ(c.S_star, 2);
  EXPECT_NEAR(c.cost, 0.2 * 2 + 0.5 * 1, 1e-12);
}

TEST(BaseStock, MatchesBruteForce) {
  for (auto d : {DemandModel::make(DemandFamily::NegativeBinomial, 8, 0.7),
                 DemandModel::make(DemandFamily::Poisson, 5, {})})
    for (int l : {0, 1, 3})
      for (double p : {0.5, 4.0, 19.0})
        EXPECT_NEAR(backlog_base_stock_cost(p, 1, l, d).cost, brute_base_stock(p, 1, l, d), 1e-8);
}

TEST(BaseStock, MonotoneInCosts) {
  const auto d = DemandModel::make(DemandFamily::NegativeBinomial, 20, 0.5);
  double prev = 0;
  for (double p : {1.0, 2.0, 5.0, 10.0, 50.0}) {
    const double c = backlog_base_stock_cost(p, 1, 2, d).cost;
    EXPECT_GT(c, prev);
    prev = c;
  }
  prev = 0;
  for (double h : {0.5, 1.0, 3.0}) {
    const double c = backlog_base_stock_cost(9, h, 2, d).cost;
    EXPECT_GT(c, prev);
    prev = c;
  }
  EXPECT_THROW(backlog_base_stock_cost(0, 1, 2, d), ValidationError);
  EXPECT_THROW(backlog_base_stock_cost(1, 1, -1, d), ValidationError);
}

TEST(LowerBound, Examples) {
  const auto d = DemandModel::make(DemandFamily::Poisson, 4, {});
  const auto inst = Instance::make(9, 1, 5, 0, 0, 1, d);
  EXPECT_NEAR(lower_bound(inst), brute_base_stock(2.5, 1, 1, d), 1e-9);
  const auto priced = Instance::make(9, 1, 5.5, 0.5, 0, 1, d);
  EXPECT_NEAR(lower_bound(priced), 0.5 * d.pmf_mean() + brute_base_stock(2.5, 1, 1, d), 1e-9);
}

TEST(LowerBound, BelowSimpleFeasibleCosts) {
  const auto d = DemandModel::make(DemandFamily::NegativeBinomial, 20, 0.5);
  const auto inst = Instance::make(19, 1, 5, 0, 0, 3, d);
  // Single-regular and single-expedited are both feasible policies.
  EXPECT_LT(lower_bound(inst), backlog_base_stock_cost(19, 1, 3, d).cost);
  EXPECT_LT(lower_bound(inst), 5 * d.pmf_mean() + backlog_base_stock_cost(19, 1, 0, d).cost);
}

TEST(GapCertificate, RatioAndNullopt) {
  const auto d = DemandModel::make(DemandFamily::Poisson, 4, {});
  const auto inst = Instance::make(9, 1, 5, 0, 0, 1, d);
  CostEstimate e;
  e.mean = 1.1 * lower_bound(inst);
  ASSERT_TRUE(gap_certificate(e, inst));
  EXPECT_NEAR(*gap_certificate(e, inst), 0.1, 1e-12);
  const auto det = Instance::make(9, 1, 5, 0, 0, 1, DemandModel::make(DemandFamily::Deterministic, 3, {}));
  EXPECT_FALSE(gap_certificate(e, det).has_value());
}

TEST(Sweep, Validation) {
  const auto d = DemandModel::make(DemandFamily::Poisson, 4, {});
  const OptimizerSettings s;
  EXPECT_THROW(asymptotic_sweep(Instance::make(9, 1, 5, 0, 0, 1, d), {}, PolicyFamily::Di, s),
               ValidationError);
  EXPECT_THROW(asymptotic_sweep(Instance::make(9, 1, 5, 0, 0, 1, d), {2, 1}, PolicyFamily::Di, s),
               ValidationError);
  EXPECT_THROW(asymptotic_sweep(Instance::make(9, 1, 5, 0, 0, 1, d), {0, 1}, PolicyFamily::Di, s),
               ValidationError);
  EXPECT_THROW(asymptotic_sweep(Instance::make(4, 1, 5, 0, 0, 1, d), {1}, PolicyFamily::Di, s),
               ValidationError);
}

TEST(Sweep, ScalesCosts) {
  const auto d = DemandModel::make(DemandFamily::Poisson, 4, {});
  OptimizerSettings s;
  s.sim.rel_halfwidth_target = 0.03;
  const auto pts = asymptotic_sweep(Instance::make(9, 1, 5, 0, 0, 2, d), {1, 4}, PolicyFamily::Di, s);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1].p, 36);
  EXPECT_EQ(pts[1].c_e, 20);
  for (const auto& pt : pts) {
    ASSERT_TRUE(pt.ratio);
    EXPECT_GT(*pt.ratio, 0.97);
    EXPECT_NEAR(*pt.ratio, pt.cost / pt.lower_bound, 1e-12);
  }
}
