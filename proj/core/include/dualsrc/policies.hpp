#pragma once

#include <limits>
#include <optional>
#include <string>

#include "dualsrc/model.hpp"
#include "dualsrc/projection.hpp"

namespace dualsrc {

enum class PolicyFamily { Peip, Tbs, Si, Di, Cdi, SingleRegular, SingleExpedited };

std::string to_string(PolicyFamily family);
PolicyFamily policy_family_from_string(const std::string& name);

/// Parameters of one ordering rule.
///
/// Every family except single-regular expedites up to `S_e`. The regular
/// rule is parameterized by one field per family:
///   peip            V      target for the projected overshoot l periods ahead
///   tbs             r      constant regular order
///   di / si         delta  regular level minus S_e
///   cdi             delta, cap
///   single-regular  S_r    order-up-to level on the full inventory position
/// Unused fields are ignored.
struct PolicyParams {
  PolicyFamily family = PolicyFamily::Peip;
  double S_e = 0.0;
  double V = 0.0;
  double r = 0.0;
  double delta = 0.0;
  double cap = std::numeric_limits<double>::infinity();
  double S_r = 0.0;

  static PolicyParams peip(double S_e, double V);
  static PolicyParams tbs(double S_e, double r);
  static PolicyParams di(double S_e, double delta);
  static PolicyParams si(double S_e, double delta);
  static PolicyParams cdi(double S_e, double delta, double cap);
  static PolicyParams single_regular(double S_r);
  static PolicyParams single_expedited(double S_e);

  /// Throws ValidationError on a negative or non-finite regular parameter.
  void validate() const;
  /// True for families that expedite with an order-up-to rule.
  bool expedites() const { return family != PolicyFamily::SingleRegular; }
  /// The same regular rule with a different expedited level.
  PolicyParams with_expedited_level(double level) const;
};

/// (S_e - ip_e)^+.
inline double expedited_order(double ip_e, double S_e) { return ip_e < S_e ? S_e - ip_e : 0.0; }

/// SystemState plus the positions the ordering rules read.
struct PolicyState {
  SystemState system;
  double ip_e = 0.0;
  double ip_r = 0.0;
  /// Regular orders outside the expedited horizon, oldest first (length l - 1).
  std::vector<double> incoming;

  static PolicyState from(const SystemState& state, const Instance& instance);
};

struct Decision {
  double q_e = 0.0;
  double q_r = 0.0;
  /// Expedited inventory position after expedited ordering, minus S_e. For
  /// every family except SI this is the overshoot (ip_e - S_e)^+ >= 0.
  double overshoot = 0.0;
  bool attainability_violation = false;
};

/// Stateful decision maker for one trajectory. Holds projection scratch
/// space and counts projection attainability violations.
class Policy {
 public:
  Policy(PolicyParams params, const Instance& instance, ProjectorOptions projector = {});

  const PolicyParams& params() const { return params_; }
  Decision decide(const SystemState& state);
  long attainability_violations() const { return violations_; }

 private:
  PolicyParams params_;
  const Instance* instance_;
  std::optional<OvershootProjector> projector_;
  RegularDecisionState rds_;
  long violations_ = 0;
};

/// Pure decision from a PolicyState. Builds a projector per call; prefer
/// Policy inside loops.
Decision decide(const PolicyParams& params, const PolicyState& pstate, const Instance& instance);

}  // namespace dualsrc
