#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dualsrc/model.hpp"

namespace dualsrc {

/// Finite lattice version of the dual-sourcing MDP.
///
/// States are (I, regular pipeline, expedited pipeline) with I in
/// [I_min, I_max] and every pipeline entry in [0, q_max]; actions are all
/// integer pairs (q_e, q_r) in [0, q_max]^2. Successor inventories outside
/// the window are clamped and counted.
class TruncatedMdp {
 public:
  const Instance& instance() const { return instance_; }
  int inventory_min() const { return i_min_; }
  int inventory_max() const { return i_max_; }
  int order_max() const { return q_max_; }
  long state_count() const { return states_; }
  int action_count() const { return (q_max_ + 1) * (q_max_ + 1); }

  std::pair<int, int> action(int a) const { return {a / (q_max_ + 1), a % (q_max_ + 1)}; }
  SystemState state(long index) const;
  long index_of(const SystemState& state) const;

  /// Successor index and one-period cost for (state, action, demand value).
  struct Transition {
    long next = 0;
    double cost = 0.0;
    bool clamped = false;
  };
  Transition transition(long state, int action, int demand) const;

  const std::vector<int>& demand_values() const { return demand_values_; }
  const std::vector<double>& demand_probs() const { return demand_probs_; }

 private:
  friend TruncatedMdp build_mdp(const Instance&, int, int, int, long);

  Instance instance_;
  int i_min_ = 0;
  int i_max_ = 0;
  int q_max_ = 0;
  int slots_ = 0;  // regular + expedited pipeline entries
  long states_ = 0;
  std::vector<int> demand_values_;
  std::vector<double> demand_probs_;
};

/// Throws StateSpaceTooLarge when the state count exceeds `state_limit`.
TruncatedMdp build_mdp(const Instance& instance, int I_min, int I_max, int q_max,
                       long state_limit = 2'000'000);

struct Truncation {
  int I_min = 0;
  int I_max = 0;
  int q_max = 0;
};

/// I in +-(l_r + 2) * D_max, q_max = 2 * D_max.
Truncation default_truncation(const Instance& instance);

struct RviResult {
  double g_star = 0.0;
  /// Bracket on g from the last iteration's value differences.
  double g_lower = 0.0;
  double g_upper = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Optimal (q_e, q_r) per state index.
  std::vector<std::pair<int, int>> policy;
  /// Clamped transitions out of states the optimal policy reaches from x_0.
  long clamped_transitions = 0;
};

/// Relative value iteration on the aperiodicity-transformed chain
/// (self-loop weight 1 - tau). Stops when the span of the value increments
/// falls below tol.
RviResult relative_value_iteration(const TruncatedMdp& mdp, double tol = 1e-9,
                                   int max_iter = 100000, double tau = 0.9);

}  // namespace dualsrc
