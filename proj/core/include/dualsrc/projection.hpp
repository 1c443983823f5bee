#pragma once

#include <optional>
#include <vector>

#include "dualsrc/atoms.hpp"
#include "dualsrc/demand.hpp"

namespace dualsrc {

/// State seen by the regular ordering rule right after expedited ordering:
/// the overshoot and the l - 1 regular orders (oldest first) that enter the
/// expedited horizon before a new regular order does.
struct RegularDecisionState {
  double overshoot = 0.0;
  std::vector<double> incoming;

  int lead_time_difference() const { return static_cast<int>(incoming.size()) + 1; }
};

struct RegularOrderSolution {
  double order = 0.0;
  /// Projected expected overshoot at the returned order.
  double projected = 0.0;
  /// False when even a zero order projects above the target (off-policy state).
  bool attainable = true;
  int evaluations = 0;
};

/// Law of (Z + offset - D)^+ for Z ~ dist and D ~ demand independent.
/// All nonpositive outcomes are collapsed into one atom at 0.
AtomDistribution lindley_step(const AtomDistribution& dist, double offset, const DemandModel& demand);

/// E[O_{t+l} | rds, q_r] by exact atom propagation. `l` must equal
/// rds.incoming.size() + 1.
double project_overshoot(const RegularDecisionState& rds, double q_r, const DemandModel& demand,
                         int l);

/// Default root tolerance 1e-6 * (1 + V).
double default_order_tolerance(double target);

/// Smallest q_r >= 0 with E[O_{t+l} | rds, q_r] = target, by bisection on a
/// geometrically grown bracket. Uses the exact reference projection.
RegularOrderSolution solve_regular_order(const RegularDecisionState& rds, double target,
                                         const DemandModel& demand, int l,
                                         std::optional<double> tol = std::nullopt);

struct ProjectorOptions {
  /// Demand lattice spacing used by the projection. 1 is exact for integer
  /// demand; 0 picks max(1, floor(sd / auto_width_divisor)).
  int lattice_width = 0;
  double auto_width_divisor = 25.0;
  /// Mass trimmed from each tail of every lattice class after a step.
  double prune_epsilon = 1e-15;
  double merge_tol = AtomDistribution::kDefaultMergeTol;
  /// Keep a single lattice through the l - 1 propagation steps by splitting
  /// the overshoot and every incoming order between the two neighbouring
  /// lattice points (mean-preserving). Approximate but several times faster
  /// for long lead times; the final step stays exact in q_r.
  bool snap_offsets = false;
};

/// Fast evaluator of the overshoot projection used inside simulations.
///
/// Intermediate laws are stored as a handful of dense lattice classes
/// (values anchor + i * w) instead of sorted atom lists, so each Lindley
/// step is a truncated dense convolution. With lattice width 1 the result
/// equals project_overshoot() up to rounding. The order is found by
/// safeguarded Newton steps from above the root, which converge
/// monotonically because the projection is convex and piecewise linear in
/// q_r. Not thread-safe: holds scratch
/// buffers; use one instance per trajectory.
class OvershootProjector {
 public:
  explicit OvershootProjector(const DemandModel& demand, ProjectorOptions options = {});

  int lattice_width() const { return width_; }

  double project(const RegularDecisionState& rds, double q_r);
  RegularOrderSolution solve(const RegularDecisionState& rds, double target,
                             std::optional<double> tol = std::nullopt);
  /// Full law of O_{t+l}, for diagnostics and tests.
  AtomDistribution distribution(const RegularDecisionState& rds, double q_r);

 private:
  struct LatticeClass {
    double anchor = 0.0;
    std::vector<double> mass;
  };

  void propagate(const RegularDecisionState& rds);
  void lindley(double offset);
  void merge_classes();
  // E[(Z + shift - D)^+]; also writes its left derivative in shift.
  double expected_positive_part(double shift, double* left_slope = nullptr) const;
  void split_offset(double offset);

  ProjectorOptions options_;
  int width_ = 1;
  double base_ = 0.0;  // value of kernel_[0]
  double mean_demand_ = 0.0;
  std::vector<double> kernel_;
  std::vector<double> kernel_prefix_;        // sum_{j<J} k_j
  std::vector<double> kernel_value_prefix_;  // sum_{j<J} d_j k_j
  double kernel_total_ = 0.0;
  std::vector<LatticeClass> classes_;
  std::vector<LatticeClass> scratch_;
};

}  // namespace dualsrc
