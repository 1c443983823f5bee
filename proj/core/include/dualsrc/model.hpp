#pragma once

#include <vector>

#include "dualsrc/demand.hpp"

namespace dualsrc {

/// Cost and lead-time parameters of one dual-sourcing system.
struct Instance {
  double p = 0.0;    // backorder cost per unit per period
  double h = 0.0;    // holding cost per unit per period
  double c_e = 0.0;  // expedited unit price
  double c_r = 0.0;  // regular unit price
  int l_e = 0;       // expedited lead time
  int l_r = 1;       // regular lead time
  DemandModel demand = DemandModel::make(DemandFamily::Deterministic, 1.0, std::nullopt);

  /// Validates the parameters. Throws ValidationError on violations.
  static Instance make(double p, double h, double c_e, double c_r, int l_e, int l_r,
                       DemandModel demand);

  int lead_time_difference() const { return l_r - l_e; }
  /// c_e >= p * l: expediting never pays and the problem is single-sourced.
  bool single_source_mode() const { return c_e >= p * lead_time_difference(); }
};

/// Net inventory after arrivals plus both pipelines, oldest order first.
///
/// `regular_pipeline[j]` is the regular order placed in period
/// t - l_r + 1 + j; `expedited_pipeline[j]` likewise with l_e.
struct SystemState {
  double inventory = 0.0;
  std::vector<double> regular_pipeline;
  std::vector<double> expedited_pipeline;
  long period = 0;

  /// x_0 = 0: empty inventory and zero outstanding orders.
  static SystemState initial(const Instance& instance);
  bool valid_for(const Instance& instance) const;
};

struct PeriodCost {
  double expedite = 0.0;
  double regular = 0.0;
  double holding = 0.0;
  double backlog = 0.0;

  double total() const { return expedite + regular + holding + backlog; }
  PeriodCost& operator+=(const PeriodCost& o);
  PeriodCost scaled(double factor) const;
};

struct StepResult {
  SystemState next;
  PeriodCost cost;
};

/// Net inventory plus every outstanding order that arrives within the
/// expedited lead time (expedited pipeline and the oldest l_e regular orders).
double expedited_inventory_position(const SystemState& state, const Instance& instance);

/// Net inventory plus all outstanding orders.
double regular_inventory_position(const SystemState& state);

/// Sum of the regular orders not yet inside the expedited horizon
/// (the l - 1 youngest regular pipeline entries).
double regular_orders_beyond_horizon(const SystemState& state, const Instance& instance);

/// One period: place (q_e, q_r), realize demand, charge costs, receive the
/// orders due at the start of the next period. An order with lead time 0
/// is received before demand in the period it is placed.
StepResult step(const SystemState& state, const Instance& instance, double q_e, double q_r,
                int demand);

/// In-place variant of step() for simulation loops.
PeriodCost advance(SystemState& state, const Instance& instance, double q_e, double q_r,
                   int demand);

}  // namespace dualsrc
