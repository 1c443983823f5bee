#include "dualsrc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "dualsrc/errors.hpp"

namespace dualsrc {

namespace {

void reject_unknown(const Json& j, const char* what, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ValidationError(std::string(what) + " must be a JSON object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ValidationError(std::string("unknown key '") + k + "' in " + what);
}

template <class T>
T required(const Json& j, const char* key, const char* what) {
  if (!j.contains(key))
    throw ValidationError(std::string("missing key '") + key + "' in " + what);
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ValidationError(std::string("key '") + key + "' in " + what + " has the wrong type");
  }
}

template <class T>
T optional_value(const Json& j, const char* key, T fallback, const char* what) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return required<T>(j, key, what);
}

// JSON has no infinity; "inf" strings and null stand in for an absent cap.
double number_or_inf(const Json& j, const char* key, const char* what) {
  if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::infinity();
  const Json& v = j.at(key);
  if (v.is_string() && (v == "inf" || v == "infinity")) return std::numeric_limits<double>::infinity();
  return required<double>(j, key, what);
}

}  // namespace

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

DemandModel demand_from_json(const Json& j) {
  const char* what = "demand";
  reject_unknown(j, what, {"family", "mean", "cov", "tail_epsilon", "pmf"});
  const double eps = optional_value(j, "tail_epsilon", DemandModel::kDefaultTailEpsilon, what);
  const DemandFamily family = demand_family_from_string(required<std::string>(j, "family", what));
  if (family == DemandFamily::Empirical)
    return DemandModel::empirical(required<std::vector<double>>(j, "pmf", what), eps);
  std::optional<double> cov;
  if (j.contains("cov") && !j.at("cov").is_null()) cov = required<double>(j, "cov", what);
  return DemandModel::make(family, required<double>(j, "mean", what), cov, eps);
}

Json to_json(const DemandModel& d) {
  Json j;
  j["family"] = to_string(d.family());
  if (d.family() == DemandFamily::Empirical) {
    std::vector<double> pmf(static_cast<std::size_t>(d.support_max() + 1), 0.0);
    for (int k = d.support_min(); k <= d.support_max(); ++k) pmf[static_cast<std::size_t>(k)] = d.pmf_at(k);
    j["pmf"] = pmf;
  } else {
    j["mean"] = d.mean();
    if (d.family() == DemandFamily::NegativeBinomial) j["cov"] = d.cov();
  }
  j["tail_epsilon"] = d.tail_epsilon();
  return j;
}

Instance instance_from_json(const Json& j) {
  const char* what = "instance";
  reject_unknown(j, what, {"p", "h", "c_e", "c_r", "l_e", "l_r", "demand"});
  return Instance::make(required<double>(j, "p", what), required<double>(j, "h", what),
                        required<double>(j, "c_e", what), optional_value(j, "c_r", 0.0, what),
                        optional_value(j, "l_e", 0, what), required<int>(j, "l_r", what),
                        demand_from_json(required<Json>(j, "demand", what)));
}

Json to_json(const Instance& inst) {
  return Json{{"p", inst.p},     {"h", inst.h},     {"c_e", inst.c_e},
              {"c_r", inst.c_r}, {"l_e", inst.l_e}, {"l_r", inst.l_r},
              {"demand", to_json(inst.demand)}};
}

PolicyParams policy_from_json(const Json& j) {
  const char* what = "policy";
  reject_unknown(j, what, {"family", "S_e", "V", "r", "delta", "cap", "S_r"});
  const PolicyFamily family = policy_family_from_string(required<std::string>(j, "family", what));
  PolicyParams p;
  switch (family) {
    case PolicyFamily::Peip:
      p = PolicyParams::peip(required<double>(j, "S_e", what), required<double>(j, "V", what));
      break;
    case PolicyFamily::Tbs:
      p = PolicyParams::tbs(required<double>(j, "S_e", what), required<double>(j, "r", what));
      break;
    case PolicyFamily::Di:
      p = PolicyParams::di(required<double>(j, "S_e", what), required<double>(j, "delta", what));
      break;
    case PolicyFamily::Si:
      p = PolicyParams::si(required<double>(j, "S_e", what), required<double>(j, "delta", what));
      break;
    case PolicyFamily::Cdi:
      p = PolicyParams::cdi(required<double>(j, "S_e", what), required<double>(j, "delta", what),
                            number_or_inf(j, "cap", what));
      break;
    case PolicyFamily::SingleRegular:
      p = PolicyParams::single_regular(required<double>(j, "S_r", what));
      break;
    case PolicyFamily::SingleExpedited:
      p = PolicyParams::single_expedited(required<double>(j, "S_e", what));
      break;
  }
  p.validate();
  return p;
}

Json to_json(const PolicyParams& p) {
  Json j;
  j["family"] = to_string(p.family);
  if (p.family != PolicyFamily::SingleRegular) j["S_e"] = p.S_e;
  switch (p.family) {
    case PolicyFamily::Peip: j["V"] = p.V; break;
    case PolicyFamily::Tbs: j["r"] = p.r; break;
    case PolicyFamily::Di:
    case PolicyFamily::Si: j["delta"] = p.delta; break;
    case PolicyFamily::Cdi:
      j["delta"] = p.delta;
      if (std::isfinite(p.cap))
        j["cap"] = p.cap;
      else
        j["cap"] = "inf";
      break;
    case PolicyFamily::SingleRegular: j["S_r"] = p.S_r; break;
    case PolicyFamily::SingleExpedited: break;
  }
  return j;
}

SimulationConfig simulation_from_json(const Json& j) {
  const char* what = "simulation";
  reject_unknown(j, what,
                 {"seed", "warmup_periods", "batch_length", "min_batches", "max_batches", "ci_level",
                  "rel_halfwidth_target", "lattice_width", "prune_epsilon", "snap_offsets"});
  SimulationConfig c;
  c.seed = optional_value<std::uint64_t>(j, "seed", c.seed, what);
  if (j.contains("warmup_periods") && !j.at("warmup_periods").is_null())
    c.warmup_periods = required<long>(j, "warmup_periods", what);
  if (j.contains("batch_length") && !j.at("batch_length").is_null())
    c.batch_length = required<long>(j, "batch_length", what);
  c.min_batches = optional_value(j, "min_batches", c.min_batches, what);
  c.max_batches = optional_value(j, "max_batches", c.max_batches, what);
  c.ci_level = optional_value(j, "ci_level", c.ci_level, what);
  c.rel_halfwidth_target = optional_value(j, "rel_halfwidth_target", c.rel_halfwidth_target, what);
  c.projector.lattice_width = optional_value(j, "lattice_width", c.projector.lattice_width, what);
  c.projector.prune_epsilon = optional_value(j, "prune_epsilon", c.projector.prune_epsilon, what);
  c.projector.snap_offsets = optional_value(j, "snap_offsets", c.projector.snap_offsets, what);
  c.validate();
  return c;
}

Json to_json(const SimulationConfig& c) {
  Json j{{"seed", c.seed},
         {"min_batches", c.min_batches},
         {"max_batches", c.max_batches},
         {"ci_level", c.ci_level},
         {"rel_halfwidth_target", c.rel_halfwidth_target},
         {"lattice_width", c.projector.lattice_width},
         {"prune_epsilon", c.projector.prune_epsilon},
         {"snap_offsets", c.projector.snap_offsets}};
  j["warmup_periods"] = c.warmup_periods ? Json(*c.warmup_periods) : Json(nullptr);
  j["batch_length"] = c.batch_length ? Json(*c.batch_length) : Json(nullptr);
  return j;
}

OptimizerSettings optimizer_from_json(const Json& j, const SimulationConfig& sim) {
  const char* what = "optimizer";
  reject_unknown(j, what,
                 {"candidate_cost", "rel_tol", "budget", "grid_points", "delta_quantile",
                  "v_initial", "v_doublings"});
  OptimizerSettings s;
  s.sim = sim;
  const auto mode = optional_value<std::string>(j, "candidate_cost", "semi-analytic", what);
  if (mode == "semi-analytic")
    s.candidate_cost = CandidateCost::SemiAnalytic;
  else if (mode == "simulate")
    s.candidate_cost = CandidateCost::Simulate;
  else
    throw ValidationError("candidate_cost must be 'semi-analytic' or 'simulate'");
  s.rel_tol = optional_value(j, "rel_tol", s.rel_tol, what);
  s.budget = optional_value(j, "budget", s.budget, what);
  s.grid_points = optional_value(j, "grid_points", s.grid_points, what);
  s.delta_quantile = optional_value(j, "delta_quantile", s.delta_quantile, what);
  s.v_initial = optional_value(j, "v_initial", s.v_initial, what);
  s.v_doublings = optional_value(j, "v_doublings", s.v_doublings, what);
  if (!(s.rel_tol > 0.0)) throw ValidationError("rel_tol must be positive");
  if (s.budget < 3) throw ValidationError("budget must be at least 3");
  if (s.grid_points == 1 || s.grid_points < 0) throw ValidationError("grid_points must be 0 or >= 2");
  if (!(s.delta_quantile > 0.0 && s.delta_quantile < 1.0))
    throw ValidationError("delta_quantile must be in (0, 1)");
  return s;
}

Json to_json(const OptimizerSettings& s) {
  return Json{{"candidate_cost", s.candidate_cost == CandidateCost::SemiAnalytic ? "semi-analytic" : "simulate"},
              {"rel_tol", s.rel_tol},
              {"budget", s.budget},
              {"grid_points", s.grid_points},
              {"delta_quantile", s.delta_quantile},
              {"v_initial", s.v_initial},
              {"v_doublings", s.v_doublings}};
}

std::string config_hash(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

}  // namespace dualsrc
