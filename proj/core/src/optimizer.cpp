#include "dualsrc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualsrc/bounds.hpp"
#include "dualsrc/errors.hpp"

namespace dualsrc {

NewsvendorLoss::NewsvendorLoss(const DemandModel& demand, int periods, double p, double h)
    : p_(p), h_(h), pmf_(convolve_pmf(demand, periods)) {
  const std::size_t n = pmf_.mass.size();
  mass_prefix_.resize(n);
  value_prefix_.resize(n);
  double m = 0.0;
  double v = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    m += pmf_.mass[j];
    v += static_cast<double>(pmf_.offset + static_cast<long>(j)) * pmf_.mass[j];
    mass_prefix_[j] = m;
    value_prefix_[j] = v;
  }
  mean_ = v;
}

long NewsvendorLoss::last_at_or_below(double y) const {
  const double idx = std::floor(y) - pmf_.offset;
  if (idx < 0.0) return -1;
  const auto last = static_cast<long>(pmf_.mass.size()) - 1;
  return idx >= static_cast<double>(last) ? last : static_cast<long>(idx);
}

double NewsvendorLoss::cdf(double y) const {
  const long j = last_at_or_below(y);
  return j < 0 ? 0.0 : mass_prefix_[static_cast<std::size_t>(j)];
}

double NewsvendorLoss::operator()(double y) const {
  const long j = last_at_or_below(y);
  double below = 0.0;  // E[(y - D)^+]
  if (j >= 0) {
    const auto J = static_cast<std::size_t>(j);
    below = y * mass_prefix_[J] - value_prefix_[J];
  }
  const double above = mean_ - y * mass_prefix_.back() + below;  // E[(D - y)^+]
  return h_ * below + p_ * std::max(above, 0.0);
}

double NewsvendorLoss::quantile(double fractile) const {
  const double f = std::min(fractile, mass_prefix_.back());
  const auto it = std::lower_bound(mass_prefix_.begin(), mass_prefix_.end(), f);
  return static_cast<double>(pmf_.offset + (it - mass_prefix_.begin()));
}

double newsvendor_level(const AtomDistribution& overshoot, const DemandModel& demand, int l_e,
                        double p, double h) {
  if (!(p > 0.0) || !(h > 0.0)) throw ValidationError("p and h must be positive");
  if (overshoot.empty()) throw ValidationError("empty overshoot distribution");
  const LatticePmf lead = convolve_pmf(demand, l_e + 1);
  std::vector<double> cdf(lead.mass.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < cdf.size(); ++j) cdf[j] = acc += lead.mass[j];

  const auto atoms = overshoot.atoms();
  auto F = [&](double s) {
    double total = 0.0;
    for (const Atom& a : atoms) {
      const double idx = std::floor(s + a.value) - lead.offset;
      if (idx < 0.0) continue;
      const double last = static_cast<double>(cdf.size() - 1);
      total += a.mass * cdf[idx >= last ? cdf.size() - 1 : static_cast<std::size_t>(idx)];
    }
    return total;
  };

  const double reachable = overshoot.total_mass() * cdf.back();
  const double target = std::min(p / (p + h), reachable * (1.0 - 1e-15));
  double lo = lead.offset - overshoot.max_value() - 1.0;
  double hi = lead.max_value() - overshoot.min_value();
  for (int it = 0; it < 200 && hi - lo > 1e-10 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (F(mid) >= target)
      hi = mid;
    else
      lo = mid;
  }
  // The infimum is a jump point d - O_i inside (lo, hi]; recover it exactly.
  std::vector<double> jumps;
  for (const Atom& a : atoms) {
    const double j = std::floor(hi + a.value) - a.value;
    if (j > lo && j <= hi) jumps.push_back(j);
  }
  std::sort(jumps.begin(), jumps.end());
  for (double j : jumps)
    if (F(j) >= target) return j;
  return hi;
}

SearchResult golden_section(const std::function<double(double)>& objective, double lo, double hi,
                            double tol, int budget) {
  if (!(lo <= hi)) throw ValidationError("golden_section needs lo <= hi");
  SearchResult best;
  best.min_value = std::numeric_limits<double>::infinity();
  auto probe = [&](double x) {
    const double v = objective(x);
    ++best.evaluations;
    if (v < best.min_value) {
      best.min_value = v;
      best.argmin = x;
    }
    return v;
  };
  probe(lo);
  if (hi == lo) return best;
  probe(hi);

  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = probe(x1);
  double f2 = probe(x2);
  while (b - a > tol) {
    if (best.evaluations >= budget) {
      best.budget_exhausted = true;
      break;
    }
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = probe(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = probe(x2);
    }
  }
  return best;
}

SearchResult grid_scan(const std::function<double(double)>& objective, double lo, double hi,
                       int points) {
  if (points < 2) throw ValidationError("grid_scan needs at least 2 points");
  SearchResult best;
  best.min_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    const double v = objective(x);
    ++best.evaluations;
    if (v < best.min_value) {
      best.min_value = v;
      best.argmin = x;
    }
  }
  return best;
}

namespace {

PolicyParams regular_rule(PolicyFamily family, double x, double cap) {
  switch (family) {
    case PolicyFamily::Peip: return PolicyParams::peip(0.0, x);
    case PolicyFamily::Tbs: return PolicyParams::tbs(0.0, x);
    case PolicyFamily::Di: return PolicyParams::di(0.0, x);
    case PolicyFamily::Si: return PolicyParams::si(0.0, x);
    case PolicyFamily::Cdi: return PolicyParams::cdi(0.0, x, cap);
    default: throw ValidationError("family has no regular-rule parameter");
  }
}

double demand_sd(const DemandModel& d, int periods) {
  return std::sqrt(d.pmf_variance() * periods);
}

OptimizationResult closed_form_single(PolicyFamily family, const Instance& inst,
                                      const OptimizerSettings& settings) {
  OptimizationResult res;
  const CandidateEvaluation ev = evaluate_candidate(
      family == PolicyFamily::SingleRegular ? PolicyParams::single_regular(0.0)
                                            : PolicyParams::single_expedited(0.0),
      inst, settings);
  res.params = ev.params;
  res.candidate_cost = ev.cost;
  res.evaluations = 1;
  res.candidates.push_back({0.0, 0.0, ev.params.S_e, ev.cost});
  return res;
}

// Golden-section plus optional grid fallback on one regular parameter.
SearchResult search_1d(const std::function<double(double)>& f, double lo, double hi,
                       const OptimizerSettings& settings) {
  SearchResult g = golden_section(f, lo, hi, settings.rel_tol * (hi - lo), settings.budget);
  if (settings.grid_points >= 2) {
    SearchResult s = grid_scan(f, lo, hi, settings.grid_points);
    const double step = (hi - lo) / (settings.grid_points - 1);
    SearchResult refine = golden_section(f, std::max(lo, s.argmin - step),
                                         std::min(hi, s.argmin + step), settings.rel_tol * (hi - lo),
                                         settings.budget);
    refine.evaluations += s.evaluations;
    if (s.min_value < refine.min_value) {
      refine.min_value = s.min_value;
      refine.argmin = s.argmin;
    }
    refine.evaluations += g.evaluations;
    if (refine.min_value < g.min_value) {
      refine.budget_exhausted = refine.budget_exhausted || g.budget_exhausted;
      return refine;
    }
    g.evaluations = refine.evaluations;
  }
  return g;
}

OptimizationResult search(PolicyFamily family, const Instance& inst,
                          const OptimizerSettings& settings) {
  OptimizationResult res;
  if (inst.single_source_mode() || family == PolicyFamily::SingleRegular) {
    res = closed_form_single(PolicyFamily::SingleRegular, inst, settings);
    res.degenerate = inst.single_source_mode();
    return res;
  }
  if (family == PolicyFamily::SingleExpedited) return closed_form_single(family, inst, settings);

  const double mu = inst.demand.pmf_mean();
  const int l = inst.lead_time_difference();
  CandidateEvaluation best_eval;
  best_eval.cost = std::numeric_limits<double>::infinity();

  auto evaluate = [&](double x, double cap) {
    const CandidateEvaluation ev = evaluate_candidate(regular_rule(family, x, cap), inst, settings);
    res.attainability_violations += ev.attainability_violations;
    res.candidates.push_back({x, cap, ev.params.S_e, ev.cost});
    ++res.evaluations;
    if (ev.cost < best_eval.cost) best_eval = ev;
    return ev.cost;
  };
  const double inf = std::numeric_limits<double>::infinity();

  switch (family) {
    case PolicyFamily::Tbs: {
      search_1d([&](double r) { return evaluate(r, inf); }, 0.0, mu, settings);
      break;
    }
    case PolicyFamily::Di:
    case PolicyFamily::Si: {
      const double hi = NewsvendorLoss(inst.demand, l, 1.0, 1.0).quantile(settings.delta_quantile);
      search_1d([&](double d) { return evaluate(d, inf); }, 0.0, hi, settings);
      break;
    }
    case PolicyFamily::Cdi: {
      const double hi = NewsvendorLoss(inst.demand, l, 1.0, 1.0).quantile(settings.delta_quantile);
      OptimizerSettings inner = settings;
      inner.grid_points = 0;
      search_1d(
          [&](double d) {
            return golden_section([&](double cap) { return evaluate(d, cap); }, 0.0, 2.0 * mu,
                                  inner.rel_tol * 2.0 * mu, inner.budget)
                .min_value;
          },
          0.0, hi, settings);
      break;
    }
    case PolicyFamily::Peip: {
      auto f = [&](double v) { return evaluate(v, inf); };
      double step = settings.v_initial > 0.0 ? settings.v_initial
                                             : std::max(1.0, demand_sd(inst.demand, l));
      double prev2 = 0.0;
      double prev = 0.0;
      double f_prev = f(0.0);
      double hi = step;
      for (int k = 0; k < settings.v_doublings; ++k) {
        const double fh = f(hi);
        if (fh > f_prev) break;
        prev2 = prev;
        prev = hi;
        f_prev = fh;
        hi *= 2.0;
      }
      search_1d(f, prev2, hi, settings);
      break;
    }
    default: throw ValidationError("unsupported family");
  }

  res.params = best_eval.params;
  res.candidate_cost = best_eval.cost;
  return res;
}

}  // namespace

CandidateEvaluation evaluate_candidate(const PolicyParams& rule, const Instance& inst,
                                       const OptimizerSettings& settings) {
  CandidateEvaluation ev;
  const double mu = inst.demand.pmf_mean();
  const double fractile = inst.p / (inst.p + inst.h);

  if (rule.family == PolicyFamily::SingleRegular) {
    const BaseStockSolution bs = backlog_base_stock_cost(inst.p, inst.h, inst.l_r, inst.demand);
    ev.params = PolicyParams::single_regular(bs.S_star);
    ev.cost = inst.c_r * mu + bs.cost;
    return ev;
  }
  const NewsvendorLoss loss(inst.demand, inst.l_e + 1, inst.p, inst.h);
  if (rule.family == PolicyFamily::SingleExpedited) {
    ev.params = PolicyParams::single_expedited(loss.quantile(fractile));
    ev.cost = inst.c_e * mu + loss(ev.params.S_e);
    return ev;
  }

  const OvershootSample os = overshoot_distribution(rule, inst, settings.sim);
  ev.attainability_violations = os.attainability_violations;
  ev.params = rule.with_expedited_level(newsvendor_level(os.law, inst.demand, inst.l_e, inst.p, inst.h));
  if (settings.candidate_cost == CandidateCost::Simulate) {
    ev.cost = simulate(ev.params, inst, settings.sim).mean;
    return ev;
  }
  double expected_loss = 0.0;
  for (const Atom& a : os.law.atoms()) expected_loss += a.mass * loss(ev.params.S_e + a.value);
  ev.cost = inst.c_e * os.mean_expedited_order + inst.c_r * os.mean_regular_order + expected_loss;
  return ev;
}

OptimizationResult optimize_policy(PolicyFamily family, const Instance& instance,
                                   const OptimizerSettings& settings) {
  OptimizationResult res = search(family, instance, settings);
  res.estimate = simulate(res.params, instance, settings.sim);
  res.attainability_violations += res.estimate.attainability_violations;
  return res;
}

std::vector<OptimizationResult> optimize_paired(const std::vector<PolicyFamily>& families,
                                                const Instance& instance,
                                                const OptimizerSettings& settings) {
  std::vector<OptimizationResult> out;
  std::vector<PolicyParams> params;
  for (PolicyFamily f : families) {
    out.push_back(search(f, instance, settings));
    params.push_back(out.back().params);
  }
  std::vector<CostEstimate> est = paired_evaluate(params, instance, settings.sim);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].estimate = std::move(est[i]);
    out[i].attainability_violations += out[i].estimate.attainability_violations;
  }
  return out;
}

}  // namespace dualsrc
