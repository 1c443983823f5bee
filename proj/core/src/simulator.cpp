#include "dualsrc/simulator.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <ostream>

#include "dualsrc/errors.hpp"

namespace dualsrc {

void SimulationConfig::validate() const {
  if (warmup_periods && *warmup_periods < 0) throw ValidationError("warmup_periods must be >= 0");
  if (batch_length && *batch_length < 1) throw ValidationError("batch_length must be >= 1");
  if (min_batches < 2) throw ValidationError("min_batches must be >= 2");
  if (max_batches < min_batches) throw ValidationError("max_batches must be >= min_batches");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw ValidationError("ci_level must be in (0, 1)");
  if (!(rel_halfwidth_target > 0.0)) throw ValidationError("rel_halfwidth_target must be positive");
}

long SimulationConfig::warmup_for(const Instance& instance) const {
  return warmup_periods.value_or(20L * (instance.l_r + 1));
}

long SimulationConfig::batch_length_for(const Instance& instance) const {
  return batch_length.value_or(200L * (instance.l_r + 1));
}

namespace {

struct Moments {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

bool meets_target(double mean, double halfwidth, double target) {
  return halfwidth <= target * std::abs(mean) || halfwidth <= 1e-12;
}

// One policy's trajectory plus its running statistics.
struct Runner {
  Runner(const PolicyParams& params, const Instance& inst, const ProjectorOptions& popts)
      : policy(params, inst, popts), state(SystemState::initial(inst)) {}

  Policy policy;
  SystemState state;
  PeriodCost batch_cost;
  PeriodCost total_cost;
  Moments q_r;
  Moments q_e;
  std::vector<double> batch_means;
};

void write_trace_row(std::ostream& out, const SystemState& before, const Decision& d, int demand,
                     const PeriodCost& c) {
  out << before.period << ',' << before.inventory << ',' << d.q_e << ',' << d.q_r << ','
      << d.overshoot << ',' << demand << ',' << c.expedite << ',' << c.regular << ',' << c.holding
      << ',' << c.backlog << '\n';
}

std::vector<CostEstimate> run_lockstep(const std::vector<PolicyParams>& policies,
                                       const Instance& inst, const SimulationConfig& cfg,
                                       std::ostream* trace) {
  cfg.validate();
  if (policies.empty()) throw ValidationError("at least one policy is required");
  std::vector<Runner> runners;
  runners.reserve(policies.size());
  for (const auto& p : policies) runners.emplace_back(p, inst, cfg.projector);

  RandomStream stream(cfg.seed);
  const long warmup = cfg.warmup_for(inst);
  const long batch = cfg.batch_length_for(inst);

  auto one_period = [&](bool record) {
    const int demand = inst.demand.sample(stream);
    for (auto& r : runners) {
      const Decision d = r.policy.decide(r.state);
      SystemState before;
      if (trace) before = r.state;
      const PeriodCost c = advance(r.state, inst, d.q_e, d.q_r, demand);
      if (trace) write_trace_row(*trace, before, d, demand, c);
      if (record) {
        r.batch_cost += c;
        r.q_r.add(d.q_r);
        r.q_e.add(d.q_e);
      }
    }
  };

  for (long t = 0; t < warmup; ++t) one_period(false);

  int batches = 0;
  bool all_converged = false;
  while (batches < cfg.max_batches) {
    for (long t = 0; t < batch; ++t) one_period(true);
    ++batches;
    for (auto& r : runners) {
      r.batch_means.push_back(r.batch_cost.total() / static_cast<double>(batch));
      r.total_cost += r.batch_cost;
      r.batch_cost = {};
    }
    if (batches < cfg.min_batches) continue;
    all_converged = true;
    for (const auto& r : runners) {
      const double hw = batch_halfwidth(r.batch_means, cfg.ci_level);
      if (!meets_target(mean_of(r.batch_means), hw, cfg.rel_halfwidth_target)) {
        all_converged = false;
        break;
      }
    }
    if (all_converged) break;
  }

  const long periods = static_cast<long>(batches) * batch;
  std::vector<CostEstimate> out;
  out.reserve(runners.size());
  for (auto& r : runners) {
    CostEstimate e;
    e.components = r.total_cost.scaled(1.0 / static_cast<double>(periods));
    e.mean = e.components.total();
    e.halfwidth = batch_halfwidth(r.batch_means, cfg.ci_level);
    e.periods_used = periods;
    e.batches = batches;
    e.order_variance_regular = r.q_r.variance();
    e.mean_regular_order = r.q_r.mean;
    e.mean_expedited_order = r.q_e.mean;
    e.converged = meets_target(e.mean, e.halfwidth, cfg.rel_halfwidth_target);
    e.attainability_violations = r.policy.attainability_violations();
    e.batch_means = std::move(r.batch_means);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

double batch_halfwidth(const std::vector<double>& values, double ci_level) {
  const std::size_t n = values.size();
  if (n < 2) return std::numeric_limits<double>::infinity();
  Moments m;
  for (double v : values) m.add(v);
  const double var = m.variance();
  if (var <= 0.0) return 0.0;
  boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(dist, 0.5 + ci_level / 2.0);
  return t * std::sqrt(var / static_cast<double>(n));
}

const char* trace_csv_header() {
  return "period,inventory,q_e,q_r,overshoot,demand,expedite_cost,regular_cost,holding_cost,"
         "backlog_cost";
}

CostEstimate simulate(const PolicyParams& policy, const Instance& instance,
                      const SimulationConfig& cfg, std::ostream* trace) {
  if (trace) *trace << trace_csv_header() << '\n';
  return run_lockstep({policy}, instance, cfg, trace).front();
}

std::vector<CostEstimate> paired_evaluate(const std::vector<PolicyParams>& policies,
                                          const Instance& instance, const SimulationConfig& cfg) {
  return run_lockstep(policies, instance, cfg, nullptr);
}

PairedDifference paired_difference(const CostEstimate& a, const CostEstimate& b, double ci_level) {
  if (a.batch_means.size() != b.batch_means.size())
    throw ValidationError("estimates do not come from one paired run");
  std::vector<double> diff(a.batch_means.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a.batch_means[i] - b.batch_means[i];
  return {a.mean - b.mean, batch_halfwidth(diff, ci_level)};
}

OvershootSample overshoot_distribution(const PolicyParams& regular_rule, const Instance& instance,
                                       const SimulationConfig& cfg) {
  cfg.validate();
  if (regular_rule.family == PolicyFamily::SingleRegular)
    throw ValidationError("single-regular has no expedited level and no overshoot");
  const PolicyParams params = regular_rule.with_expedited_level(0.0);
  Policy policy(params, instance, cfg.projector);
  SystemState state = SystemState::initial(instance);
  RandomStream stream(cfg.seed);
  const long warmup = cfg.warmup_for(instance);
  const long batch = cfg.batch_length_for(instance);

  std::vector<double> samples;
  std::vector<double> batch_mean;
  std::vector<double> batch_sd;
  Moments all;
  Moments q_r;
  Moments q_e;

  auto one_period = [&](Moments* b) {
    const int demand = instance.demand.sample(stream);
    const Decision d = policy.decide(state);
    advance(state, instance, d.q_e, d.q_r, demand);
    if (b) {
      b->add(d.overshoot);
      all.add(d.overshoot);
      q_r.add(d.q_r);
      q_e.add(d.q_e);
      samples.push_back(d.overshoot);
    }
  };

  for (long t = 0; t < warmup; ++t) one_period(nullptr);

  OvershootSample out;
  int batches = 0;
  while (batches < cfg.max_batches) {
    Moments b;
    for (long t = 0; t < batch; ++t) one_period(&b);
    ++batches;
    batch_mean.push_back(b.mean);
    batch_sd.push_back(std::sqrt(b.variance()));
    if (batches < cfg.min_batches) continue;
    const double sd = std::sqrt(all.variance());
    const bool mean_ok =
        meets_target(all.mean, batch_halfwidth(batch_mean, cfg.ci_level), cfg.rel_halfwidth_target);
    const bool sd_ok =
        meets_target(sd, batch_halfwidth(batch_sd, cfg.ci_level), cfg.rel_halfwidth_target);
    if (mean_ok && sd_ok) {
      out.converged = true;
      break;
    }
  }

  out.law = AtomDistribution::from_samples(samples);
  out.mean = all.mean;
  out.sd = std::sqrt(all.variance());
  out.mean_regular_order = q_r.mean;
  out.mean_expedited_order = q_e.mean;
  out.order_variance_regular = q_r.variance();
  out.periods_used = static_cast<long>(batches) * batch;
  out.attainability_violations = policy.attainability_violations();
  return out;
}

}  // namespace dualsrc
