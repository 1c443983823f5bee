#pragma once

#include <optional>
#include <vector>

#include "dualsrc/demand.hpp"
#include "dualsrc/model.hpp"
#include "dualsrc/optimizer.hpp"
#include "dualsrc/simulator.hpp"

namespace dualsrc {

struct BaseStockSolution {
  double S_star = 0.0;
  double cost = 0.0;
};

/// Optimal order-up-to level and average holding plus backorder cost of the
/// single-supplier backlog system with lead time l.
BaseStockSolution backlog_base_stock_cost(double p, double h, int l, const DemandModel& demand);

/// Lower bound on the long-run average cost of any policy. With c_r > 0 the
/// bound is computed on prices net of c_r and c_r * E[D] is added back.
double lower_bound(const Instance& instance);

/// cost / lower_bound - 1, or nullopt when the bound is 0.
std::optional<double> gap_certificate(const CostEstimate& estimate, const Instance& instance);

struct SweepPoint {
  int n = 1;
  double p = 0.0;
  double c_e = 0.0;
  PolicyParams params;
  double cost = 0.0;
  double halfwidth = 0.0;
  double lower_bound = 0.0;
  std::optional<double> ratio;
  std::optional<double> gap;
  long attainability_violations = 0;
};

/// Optimizes `family` on (p * n, c_e * n) for each n in `scales` and reports
/// cost over lower bound.
std::vector<SweepPoint> asymptotic_sweep(const Instance& instance, const std::vector<int>& scales,
                                         PolicyFamily family, const OptimizerSettings& settings);

}  // namespace dualsrc
