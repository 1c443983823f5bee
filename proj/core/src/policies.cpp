#include "dualsrc/policies.hpp"

#include <algorithm>
#include <cmath>

#include "dualsrc/errors.hpp"

namespace dualsrc {

std::string to_string(PolicyFamily family) {
  switch (family) {
    case PolicyFamily::Peip: return "peip";
    case PolicyFamily::Tbs: return "tbs";
    case PolicyFamily::Si: return "si";
    case PolicyFamily::Di: return "di";
    case PolicyFamily::Cdi: return "cdi";
    case PolicyFamily::SingleRegular: return "single-regular";
    case PolicyFamily::SingleExpedited: return "single-expedited";
  }
  return "unknown";
}

PolicyFamily policy_family_from_string(const std::string& name) {
  if (name == "peip") return PolicyFamily::Peip;
  if (name == "tbs") return PolicyFamily::Tbs;
  if (name == "si") return PolicyFamily::Si;
  if (name == "di") return PolicyFamily::Di;
  if (name == "cdi") return PolicyFamily::Cdi;
  if (name == "single-regular") return PolicyFamily::SingleRegular;
  if (name == "single-expedited") return PolicyFamily::SingleExpedited;
  throw ValidationError("unknown policy family '" + name + "'");
}

PolicyParams PolicyParams::peip(double S_e, double V) {
  PolicyParams p;
  p.family = PolicyFamily::Peip;
  p.S_e = S_e;
  p.V = V;
  return p;
}

PolicyParams PolicyParams::tbs(double S_e, double r) {
  PolicyParams p;
  p.family = PolicyFamily::Tbs;
  p.S_e = S_e;
  p.r = r;
  return p;
}

PolicyParams PolicyParams::di(double S_e, double delta) {
  PolicyParams p;
  p.family = PolicyFamily::Di;
  p.S_e = S_e;
  p.delta = delta;
  return p;
}

PolicyParams PolicyParams::si(double S_e, double delta) {
  PolicyParams p;
  p.family = PolicyFamily::Si;
  p.S_e = S_e;
  p.delta = delta;
  return p;
}

PolicyParams PolicyParams::cdi(double S_e, double delta, double cap) {
  PolicyParams p;
  p.family = PolicyFamily::Cdi;
  p.S_e = S_e;
  p.delta = delta;
  p.cap = cap;
  return p;
}

PolicyParams PolicyParams::single_regular(double S_r) {
  PolicyParams p;
  p.family = PolicyFamily::SingleRegular;
  p.S_e = -std::numeric_limits<double>::infinity();
  p.S_r = S_r;
  return p;
}

PolicyParams PolicyParams::single_expedited(double S_e) {
  PolicyParams p;
  p.family = PolicyFamily::SingleExpedited;
  p.S_e = S_e;
  return p;
}

void PolicyParams::validate() const {
  auto nonneg = [](double x, const char* what) {
    if (!(x >= 0.0) || std::isnan(x))
      throw ValidationError(std::string(what) + " must be nonnegative");
  };
  switch (family) {
    case PolicyFamily::Peip: nonneg(V, "V"); break;
    case PolicyFamily::Tbs: nonneg(r, "r"); break;
    case PolicyFamily::Di:
    case PolicyFamily::Si: nonneg(delta, "delta"); break;
    case PolicyFamily::Cdi:
      nonneg(delta, "delta");
      nonneg(cap, "cap");
      break;
    case PolicyFamily::SingleRegular:
      if (!std::isfinite(S_r)) throw ValidationError("S_r must be finite");
      return;
    case PolicyFamily::SingleExpedited: break;
  }
  if (!std::isfinite(S_e)) throw ValidationError("S_e must be finite");
}

PolicyParams PolicyParams::with_expedited_level(double level) const {
  PolicyParams p = *this;
  p.S_e = level;
  return p;
}

PolicyState PolicyState::from(const SystemState& state, const Instance& instance) {
  PolicyState ps;
  ps.system = state;
  ps.ip_e = expedited_inventory_position(state, instance);
  ps.ip_r = regular_inventory_position(state);
  const auto within = static_cast<std::size_t>(instance.l_e);
  if (state.regular_pipeline.size() > within)
    ps.incoming.assign(state.regular_pipeline.begin() + static_cast<std::ptrdiff_t>(within),
                       state.regular_pipeline.end());
  return ps;
}

Policy::Policy(PolicyParams params, const Instance& instance, ProjectorOptions projector)
    : params_(params), instance_(&instance) {
  params_.validate();
  if (params_.family == PolicyFamily::Peip) projector_.emplace(instance.demand, projector);
  rds_.incoming.assign(static_cast<std::size_t>(instance.lead_time_difference() - 1), 0.0);
}

Decision Policy::decide(const SystemState& state) {
  const Instance& inst = *instance_;
  Decision d;
  const double ip_e = expedited_inventory_position(state, inst);

  switch (params_.family) {
    case PolicyFamily::SingleRegular: {
      d.q_r = std::max(params_.S_r - regular_inventory_position(state), 0.0);
      return d;
    }
    case PolicyFamily::Si: {
      const double ip_r = regular_inventory_position(state);
      d.q_e = expedited_order(ip_r, params_.S_e);
      d.q_r = std::max(params_.S_e + params_.delta - (ip_r + d.q_e), 0.0);
      d.overshoot = ip_e + d.q_e - params_.S_e;
      return d;
    }
    default: break;
  }

  d.q_e = expedited_order(ip_e, params_.S_e);
  // Exactly 0 after an expedited order; ip_e + q_e - S_e can round below it.
  d.overshoot = d.q_e > 0.0 ? 0.0 : ip_e - params_.S_e;

  switch (params_.family) {
    case PolicyFamily::Peip: {
      rds_.overshoot = d.overshoot;
      std::copy(state.regular_pipeline.begin() + inst.l_e, state.regular_pipeline.end(),
                rds_.incoming.begin());
      const RegularOrderSolution sol = projector_->solve(rds_, params_.V);
      d.q_r = sol.order;
      if (!sol.attainable) {
        d.attainability_violation = true;
        ++violations_;
      }
      break;
    }
    case PolicyFamily::Tbs: d.q_r = params_.r; break;
    case PolicyFamily::Di:
    case PolicyFamily::Cdi: {
      const double ip_r_after = regular_inventory_position(state) + d.q_e;
      d.q_r = std::max(params_.S_e + params_.delta - ip_r_after, 0.0);
      if (params_.family == PolicyFamily::Cdi) d.q_r = std::min(d.q_r, params_.cap);
      break;
    }
    case PolicyFamily::SingleExpedited: d.q_r = 0.0; break;
    default: break;
  }
  return d;
}

Decision decide(const PolicyParams& params, const PolicyState& pstate, const Instance& instance) {
  Policy policy(params, instance);
  return policy.decide(pstate.system);
}

}  // namespace dualsrc
