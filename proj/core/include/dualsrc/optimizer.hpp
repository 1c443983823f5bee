#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dualsrc/atoms.hpp"
#include "dualsrc/demand.hpp"
#include "dualsrc/model.hpp"
#include "dualsrc/policies.hpp"
#include "dualsrc/simulator.hpp"

namespace dualsrc {

/// h E[(y - D)^+] + p E[(D - y)^+] for D the n-period demand, in O(log n)
/// per call via prefix sums over the pmf.
class NewsvendorLoss {
 public:
  NewsvendorLoss(const DemandModel& demand, int periods, double p, double h);

  double operator()(double y) const;
  /// P(D <= y).
  double cdf(double y) const;
  /// inf{s : P(D <= s) >= fractile}.
  double quantile(double fractile) const;
  double mean() const { return mean_; }

 private:
  // Index of the last lattice point <= y, clamped to [-1, size-1].
  long last_at_or_below(double y) const;

  double p_ = 0.0;
  double h_ = 0.0;
  LatticePmf pmf_;
  std::vector<double> mass_prefix_;   // sum_{j<=J} m_j
  std::vector<double> value_prefix_;  // sum_{j<=J} d_j m_j
  double mean_ = 0.0;
};

/// inf{s : sum_i m_i F(s + O_i) >= p / (p + h)} where F is the cdf of the
/// (l_e + 1)-period demand and (O_i, m_i) are the atoms of `overshoot`.
double newsvendor_level(const AtomDistribution& overshoot, const DemandModel& demand, int l_e,
                        double p, double h);

struct SearchResult {
  double argmin = 0.0;
  double min_value = 0.0;
  int evaluations = 0;
  bool budget_exhausted = false;
};

/// Golden-section search on [lo, hi]. Both endpoints are probed too, so a
/// monotone objective returns the better endpoint.
SearchResult golden_section(const std::function<double(double)>& objective, double lo, double hi,
                            double tol, int budget);

/// Best of `points` equally spaced probes on [lo, hi] (points >= 2).
SearchResult grid_scan(const std::function<double(double)>& objective, double lo, double hi,
                       int points);

enum class CandidateCost { SemiAnalytic, Simulate };

struct OptimizerSettings {
  /// Used for overshoot sampling, candidate costs, and the final estimate.
  SimulationConfig sim;
  CandidateCost candidate_cost = CandidateCost::SemiAnalytic;
  /// Golden-section stops once the bracket is below rel_tol * initial width.
  double rel_tol = 0.004;
  int budget = 60;
  /// > 0 adds a grid scan with this many points; the better answer wins.
  int grid_points = 0;
  double delta_quantile = 0.999;
  /// Starting upper end for the V bracket; 0 picks sd of l-period demand.
  double v_initial = 0.0;
  int v_doublings = 20;
};

struct CandidateRecord {
  double parameter = 0.0;
  double secondary = 0.0;  // cap for CDI
  double S_e = 0.0;
  double cost = 0.0;
};

struct OptimizationResult {
  PolicyParams params;
  CostEstimate estimate;
  /// Search objective at the returned parameters.
  double candidate_cost = 0.0;
  int evaluations = 0;
  bool budget_exhausted = false;
  /// c_e >= p * l: single-regular parameters returned.
  bool degenerate = false;
  long attainability_violations = 0;
  std::vector<CandidateRecord> candidates;
};

/// Expedited level and candidate cost of one regular rule.
struct CandidateEvaluation {
  PolicyParams params;
  double cost = 0.0;
  long attainability_violations = 0;
};

CandidateEvaluation evaluate_candidate(const PolicyParams& regular_rule, const Instance& instance,
                                       const OptimizerSettings& settings);

/// Optimizes the regular-rule parameter(s) of `family`, setting S_e by the
/// newsvendor rule for each candidate, then estimates the cost of the best
/// candidate by simulation.
OptimizationResult optimize_policy(PolicyFamily family, const Instance& instance,
                                   const OptimizerSettings& settings);

/// Optimizes every family and re-estimates all winners on one paired run.
std::vector<OptimizationResult> optimize_paired(const std::vector<PolicyFamily>& families,
                                                const Instance& instance,
                                                const OptimizerSettings& settings);

}  // namespace dualsrc
