#include "dualsrc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dualsrc/errors.hpp"

namespace dualsrc {

Instance Instance::make(double p, double h, double c_e, double c_r, int l_e, int l_r,
                        DemandModel demand) {
  if (!(p > 0.0)) throw ValidationError("backorder cost p must be positive");
  if (!(h > 0.0)) throw ValidationError("holding cost h must be positive");
  if (!(c_r >= 0.0)) throw ValidationError("regular price c_r must be nonnegative");
  if (!(c_e > c_r)) throw ValidationError("expedited price must exceed the regular price");
  if (l_e < 0) throw ValidationError("expedited lead time must be nonnegative");
  if (l_r <= l_e) throw ValidationError("regular lead time must exceed the expedited lead time");
  Instance inst;
  inst.p = p;
  inst.h = h;
  inst.c_e = c_e;
  inst.c_r = c_r;
  inst.l_e = l_e;
  inst.l_r = l_r;
  inst.demand = std::move(demand);
  return inst;
}

SystemState SystemState::initial(const Instance& instance) {
  SystemState s;
  s.regular_pipeline.assign(static_cast<std::size_t>(std::max(instance.l_r - 1, 0)), 0.0);
  s.expedited_pipeline.assign(static_cast<std::size_t>(std::max(instance.l_e - 1, 0)), 0.0);
  return s;
}

bool SystemState::valid_for(const Instance& instance) const {
  if (regular_pipeline.size() != static_cast<std::size_t>(std::max(instance.l_r - 1, 0)))
    return false;
  if (expedited_pipeline.size() != static_cast<std::size_t>(std::max(instance.l_e - 1, 0)))
    return false;
  auto nonneg = [](double x) { return x >= 0.0; };
  return std::all_of(regular_pipeline.begin(), regular_pipeline.end(), nonneg) &&
         std::all_of(expedited_pipeline.begin(), expedited_pipeline.end(), nonneg);
}

PeriodCost& PeriodCost::operator+=(const PeriodCost& o) {
  expedite += o.expedite;
  regular += o.regular;
  holding += o.holding;
  backlog += o.backlog;
  return *this;
}

PeriodCost PeriodCost::scaled(double factor) const {
  return {expedite * factor, regular * factor, holding * factor, backlog * factor};
}

double expedited_inventory_position(const SystemState& state, const Instance& instance) {
  double ip = state.inventory;
  for (double q : state.expedited_pipeline) ip += q;
  // Regular orders placed in t-l_r+1 .. t-l arrive within the expedited lead time.
  const auto within = static_cast<std::size_t>(instance.l_e);
  for (std::size_t j = 0; j < within && j < state.regular_pipeline.size(); ++j)
    ip += state.regular_pipeline[j];
  return ip;
}

double regular_inventory_position(const SystemState& state) {
  double ip = state.inventory;
  for (double q : state.expedited_pipeline) ip += q;
  for (double q : state.regular_pipeline) ip += q;
  return ip;
}

double regular_orders_beyond_horizon(const SystemState& state, const Instance& instance) {
  double s = 0.0;
  for (std::size_t j = static_cast<std::size_t>(instance.l_e); j < state.regular_pipeline.size(); ++j)
    s += state.regular_pipeline[j];
  return s;
}

namespace {

// Appends `order` to a pipeline of length lead-1 and returns the entry that
// arrives next period (or the order itself when lead == 1).
double push_and_pop(std::vector<double>& pipeline, double order) {
  if (pipeline.empty()) return order;
  const double arriving = pipeline.front();
  std::shift_left(pipeline.begin(), pipeline.end(), 1);
  pipeline.back() = order;
  return arriving;
}

}  // namespace

PeriodCost advance(SystemState& state, const Instance& instance, double q_e, double q_r,
                   int demand) {
  if (!(q_e >= 0.0) || !(q_r >= 0.0)) throw ValidationError("order quantities must be nonnegative");
  PeriodCost cost;
  cost.expedite = instance.c_e * q_e;
  cost.regular = instance.c_r * q_r;

  double on_hand = state.inventory;
  double arriving_next = 0.0;
  if (instance.l_e == 0) {
    on_hand += q_e;
  } else {
    arriving_next += push_and_pop(state.expedited_pipeline, q_e);
  }
  arriving_next += push_and_pop(state.regular_pipeline, q_r);

  const double net = on_hand - demand;
  cost.holding = instance.h * std::max(net, 0.0);
  cost.backlog = instance.p * std::max(-net, 0.0);

  state.inventory = net + arriving_next;
  ++state.period;
  return cost;
}

StepResult step(const SystemState& state, const Instance& instance, double q_e, double q_r,
                int demand) {
  StepResult r{state, {}};
  r.cost = advance(r.next, instance, q_e, q_r, demand);
  return r;
}

}  // namespace dualsrc
