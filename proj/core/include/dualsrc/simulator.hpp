#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dualsrc/atoms.hpp"
#include "dualsrc/model.hpp"
#include "dualsrc/policies.hpp"

namespace dualsrc {

struct SimulationConfig {
  std::uint64_t seed = 20240601;
  /// Unset: 20 * (l_r + 1).
  std::optional<long> warmup_periods;
  /// Unset: 200 * (l_r + 1).
  std::optional<long> batch_length;
  int min_batches = 10;
  int max_batches = 2000;
  double ci_level = 0.95;
  double rel_halfwidth_target = 0.01;
  ProjectorOptions projector;

  void validate() const;
  long warmup_for(const Instance& instance) const;
  long batch_length_for(const Instance& instance) const;
};

struct CostEstimate {
  double mean = 0.0;
  double halfwidth = 0.0;
  PeriodCost components;
  long periods_used = 0;
  int batches = 0;
  /// Long-run variance of the regular order quantity.
  double order_variance_regular = 0.0;
  double mean_regular_order = 0.0;
  double mean_expedited_order = 0.0;
  /// False when max_batches ran out before the relative half-width target.
  bool converged = false;
  long attainability_violations = 0;
  std::vector<double> batch_means;
};

/// Student-t confidence half-width of the mean of `values`.
double batch_halfwidth(const std::vector<double>& values, double ci_level);

/// Long-run average cost of one policy from x_0 = 0. When `trace` is set,
/// every period (warm-up included) is written as a CSV row.
CostEstimate simulate(const PolicyParams& policy, const Instance& instance,
                      const SimulationConfig& cfg, std::ostream* trace = nullptr);

/// Header line matching the rows written by simulate(..., trace).
const char* trace_csv_header();

/// All policies driven by one demand path (common random numbers) and one
/// stopping rule: batches continue until every policy meets the target.
std::vector<CostEstimate> paired_evaluate(const std::vector<PolicyParams>& policies,
                                          const Instance& instance, const SimulationConfig& cfg);

/// Mean and half-width of per-batch differences a - b, for estimates that
/// came out of one paired_evaluate call.
struct PairedDifference {
  double mean = 0.0;
  double halfwidth = 0.0;
};
PairedDifference paired_difference(const CostEstimate& a, const CostEstimate& b, double ci_level);

struct OvershootSample {
  AtomDistribution law;
  double mean = 0.0;
  double sd = 0.0;
  double mean_regular_order = 0.0;
  // Same for every S_e; prices expediting without the noise of mean demand.
  double mean_expedited_order = 0.0;
  double order_variance_regular = 0.0;
  long periods_used = 0;
  bool converged = false;
  long attainability_violations = 0;
};

/// Steady-state law of the overshoot (IP^e after expedited ordering minus
/// S_e) under the regular rule of `regular_rule`. S_e is irrelevant to this
/// law and is fixed at 0. Sampling stops when the batch-means relative
/// half-widths of both the mean and the standard deviation meet the target.
OvershootSample overshoot_distribution(const PolicyParams& regular_rule, const Instance& instance,
                                       const SimulationConfig& cfg);

}  // namespace dualsrc
