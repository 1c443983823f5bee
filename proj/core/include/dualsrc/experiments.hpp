#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dualsrc/optimizer.hpp"
#include "dualsrc/testbed.hpp"

namespace dualsrc {

/// Runs fn(0..n-1) on up to `workers` threads. Results must be written by
/// index so the output does not depend on scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

struct FamilyOutcome {
  PolicyFamily family = PolicyFamily::Peip;
  PolicyParams params;
  double cost = 0.0;
  double halfwidth = 0.0;
  /// 100 * (cost - cost_peip) / cost_peip.
  double gap_pct = 0.0;
  /// Half-width of the paired difference, in the same percent units.
  double gap_halfwidth_pct = 0.0;
  /// PEIP cost <= this family's cost up to the paired half-width.
  bool peip_wins = true;
  bool converged = false;
  double order_variance_regular = 0.0;
  long attainability_violations = 0;
};

struct InstanceOutcome {
  TestbedInstance instance;
  std::vector<FamilyOutcome> families;
  std::string error;
};

struct BenchmarkReport {
  std::vector<PolicyFamily> families;
  std::vector<InstanceOutcome> instances;
};

/// Optimizes every family on every instance and evaluates the winners on
/// one paired run per instance. PEIP is added when missing since gaps are
/// measured against it. A failing instance records its error and the run
/// continues.
BenchmarkReport run_benchmark(const std::vector<TestbedInstance>& testbed,
                              std::vector<PolicyFamily> families, const OptimizerSettings& settings,
                              int workers = 1);

struct AggregateRow {
  std::string slice;  // "all", "p", "l_r", "cov" or "delta"
  double level = 0.0;
  PolicyFamily family = PolicyFamily::Peip;
  int instances = 0;
  double avg_gap_pct = 0.0;
  double max_gap_pct = 0.0;
  double min_gap_pct = 0.0;
  double pct_peip_wins = 0.0;
};

std::vector<AggregateRow> aggregate(const BenchmarkReport& report);

void write_results_csv(std::ostream& out, const BenchmarkReport& report, std::uint64_t seed,
                       const std::string& hash);
void write_aggregates_csv(std::ostream& out, const std::vector<AggregateRow>& rows,
                          std::uint64_t seed, const std::string& hash);

struct LongleadRow {
  int l = 1;
  PolicyFamily family = PolicyFamily::Peip;
  PolicyParams params;
  double cost = 0.0;
  double halfwidth = 0.0;
  /// 100 * (cost_tbs - cost) / cost_tbs.
  double red_pct = 0.0;
  double order_variance_regular = 0.0;
  double mean_regular_order = 0.0;
  bool converged = false;
  long attainability_violations = 0;
};

/// For each l, sets l_r = l_e + l on `base`, optimizes the families (TBS is
/// added when missing) and reports %RED against TBS from one paired run.
std::vector<LongleadRow> run_longlead(const Instance& base, const std::vector<int>& l_values,
                                      std::vector<PolicyFamily> families,
                                      const OptimizerSettings& settings, int workers = 1);

void write_longlead_csv(std::ostream& out, const std::vector<LongleadRow>& rows, std::uint64_t seed,
                        const std::string& hash);

}  // namespace dualsrc
