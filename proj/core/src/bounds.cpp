#include "dualsrc/bounds.hpp"

#include <algorithm>

#include "dualsrc/errors.hpp"

namespace dualsrc {

BaseStockSolution backlog_base_stock_cost(double p, double h, int l, const DemandModel& demand) {
  if (!(p > 0.0) || !(h > 0.0)) throw ValidationError("p and h must be positive");
  if (l < 0) throw ValidationError("lead time must be nonnegative");
  const NewsvendorLoss loss(demand, l + 1, p, h);
  BaseStockSolution out;
  out.S_star = loss.quantile(p / (p + h));
  out.cost = loss(out.S_star);
  return out;
}

double lower_bound(const Instance& instance) {
  const double unit = (instance.c_e - instance.c_r) / (instance.l_r + 1);
  return instance.c_r * instance.demand.pmf_mean() +
         backlog_base_stock_cost(unit, instance.h, instance.l_r, instance.demand).cost;
}

std::optional<double> gap_certificate(const CostEstimate& estimate, const Instance& instance) {
  const double lb = lower_bound(instance);
  if (!(lb > 1e-12)) return std::nullopt;
  return estimate.mean / lb - 1.0;
}

std::vector<SweepPoint> asymptotic_sweep(const Instance& instance, const std::vector<int>& scales,
                                         PolicyFamily family, const OptimizerSettings& settings) {
  if (instance.single_source_mode())
    throw ValidationError("sweep requires c_e < p * l");
  if (scales.empty()) throw ValidationError("no scales given");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 1) throw ValidationError("scales must be positive");
    if (i > 0 && scales[i] <= scales[i - 1]) throw ValidationError("scales must be increasing");
  }
  std::vector<SweepPoint> out;
  for (int n : scales) {
    const Instance scaled = Instance::make(instance.p * n, instance.h, instance.c_e * n,
                                           instance.c_r, instance.l_e, instance.l_r, instance.demand);
    const OptimizationResult opt = optimize_policy(family, scaled, settings);
    SweepPoint pt;
    pt.n = n;
    pt.p = scaled.p;
    pt.c_e = scaled.c_e;
    pt.params = opt.params;
    pt.cost = opt.estimate.mean;
    pt.halfwidth = opt.estimate.halfwidth;
    pt.lower_bound = lower_bound(scaled);
    pt.gap = gap_certificate(opt.estimate, scaled);
    if (pt.gap) pt.ratio = *pt.gap + 1.0;
    pt.attainability_violations = opt.attainability_violations;
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace dualsrc
