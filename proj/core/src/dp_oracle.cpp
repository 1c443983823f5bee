#include "dualsrc/dp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dualsrc/errors.hpp"

namespace dualsrc {

TruncatedMdp build_mdp(const Instance& instance, int I_min, int I_max, int q_max, long state_limit) {
  if (I_min > I_max) throw ValidationError("empty inventory window");
  if (q_max < 0) throw ValidationError("q_max must be nonnegative");
  TruncatedMdp mdp;
  mdp.instance_ = instance;
  mdp.i_min_ = I_min;
  mdp.i_max_ = I_max;
  mdp.q_max_ = q_max;
  mdp.slots_ = std::max(instance.l_r - 1, 0) + std::max(instance.l_e - 1, 0);

  double count = I_max - I_min + 1;
  for (int s = 0; s < mdp.slots_; ++s) count *= q_max + 1;
  if (count > static_cast<double>(state_limit))
    throw StateSpaceTooLarge("state space of " + std::to_string(static_cast<long long>(count)) +
                                 " states exceeds the limit of " + std::to_string(state_limit),
                             static_cast<long long>(std::min(count, 9e18)));
  mdp.states_ = static_cast<long>(count);

  const auto pmf = instance.demand.pmf();
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    if (pmf[k] <= 0.0) continue;
    mdp.demand_values_.push_back(instance.demand.support_min() + static_cast<int>(k));
    mdp.demand_probs_.push_back(pmf[k]);
  }
  return mdp;
}

Truncation default_truncation(const Instance& instance) {
  const int d_max = instance.demand.support_max();
  return {-(instance.l_r + 2) * d_max, (instance.l_r + 2) * d_max, 2 * d_max};
}

SystemState TruncatedMdp::state(long index) const {
  SystemState s = SystemState::initial(instance_);
  const long base = q_max_ + 1;
  // Last slot varies fastest: expedited pipeline, then regular pipeline.
  for (auto it = s.expedited_pipeline.rbegin(); it != s.expedited_pipeline.rend(); ++it) {
    *it = static_cast<double>(index % base);
    index /= base;
  }
  for (auto it = s.regular_pipeline.rbegin(); it != s.regular_pipeline.rend(); ++it) {
    *it = static_cast<double>(index % base);
    index /= base;
  }
  s.inventory = static_cast<double>(i_min_ + index);
  return s;
}

long TruncatedMdp::index_of(const SystemState& s) const {
  long index = static_cast<long>(std::lround(s.inventory)) - i_min_;
  const long base = q_max_ + 1;
  for (double q : s.regular_pipeline) index = index * base + std::lround(q);
  for (double q : s.expedited_pipeline) index = index * base + std::lround(q);
  return index;
}

TruncatedMdp::Transition TruncatedMdp::transition(long index, int a, int demand) const {
  SystemState s = state(index);
  const auto [q_e, q_r] = action(a);
  Transition t;
  t.cost = advance(s, instance_, q_e, q_r, demand).total();
  if (s.inventory < i_min_) {
    s.inventory = i_min_;
    t.clamped = true;
  } else if (s.inventory > i_max_) {
    s.inventory = i_max_;
    t.clamped = true;
  }
  t.next = index_of(s);
  return t;
}

RviResult relative_value_iteration(const TruncatedMdp& mdp, double tol, int max_iter, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("tau must be in (0, 1]");
  const long n = mdp.state_count();
  const int actions = mdp.action_count();
  const auto& probs = mdp.demand_probs();
  const std::size_t nd = probs.size();

  // Tabulate transitions once: [state][action][demand].
  const std::size_t per_state = static_cast<std::size_t>(actions) * nd;
  std::vector<long> next(static_cast<std::size_t>(n) * per_state);
  std::vector<double> cost(static_cast<std::size_t>(n) * static_cast<std::size_t>(actions));
  std::vector<char> clamped(next.size());
  for (long s = 0; s < n; ++s)
    for (int a = 0; a < actions; ++a) {
      double c = 0.0;
      for (std::size_t k = 0; k < nd; ++k) {
        const auto tr = mdp.transition(s, a, mdp.demand_values()[k]);
        const std::size_t slot = static_cast<std::size_t>(s) * per_state + a * nd + k;
        next[slot] = tr.next;
        clamped[slot] = tr.clamped;
        c += probs[k] * tr.cost;
      }
      cost[static_cast<std::size_t>(s) * actions + a] = c;
    }

  std::vector<double> h(static_cast<std::size_t>(n), 0.0);
  std::vector<double> h_new(h.size());
  std::vector<int> best(h.size(), 0);
  RviResult res;
  for (int it = 1; it <= max_iter; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (long s = 0; s < n; ++s) {
      double v_best = std::numeric_limits<double>::infinity();
      int a_best = 0;
      for (int a = 0; a < actions; ++a) {
        const std::size_t base = static_cast<std::size_t>(s) * per_state + a * nd;
        double v = cost[static_cast<std::size_t>(s) * actions + a];
        for (std::size_t k = 0; k < nd; ++k) v += probs[k] * h[static_cast<std::size_t>(next[base + k])];
        if (v < v_best) {
          v_best = v;
          a_best = a;
        }
      }
      const auto i = static_cast<std::size_t>(s);
      const double updated = (1.0 - tau) * h[i] + tau * v_best;
      const double diff = (updated - h[i]) / tau;
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
      h_new[i] = updated;
      best[i] = a_best;
    }
    const double ref = h_new[0];
    for (auto& v : h_new) v -= ref;
    h.swap(h_new);
    res.iterations = it;
    res.g_lower = lo;
    res.g_upper = hi;
    if (hi - lo < tol) {
      res.converged = true;
      break;
    }
  }
  res.g_star = 0.5 * (res.g_lower + res.g_upper);
  res.policy.reserve(h.size());
  for (long s = 0; s < n; ++s) res.policy.push_back(mdp.action(best[static_cast<std::size_t>(s)]));

  // Clamping only matters on states the optimal policy visits from x_0 = 0.
  SystemState origin = SystemState::initial(mdp.instance());
  if (mdp.inventory_min() <= 0 && mdp.inventory_max() >= 0) {
    std::vector<char> seen(h.size(), 0);
    std::vector<long> stack{mdp.index_of(origin)};
    seen[static_cast<std::size_t>(stack.back())] = 1;
    while (!stack.empty()) {
      const long s = stack.back();
      stack.pop_back();
      const std::size_t base = static_cast<std::size_t>(s) * per_state + best[static_cast<std::size_t>(s)] * nd;
      for (std::size_t k = 0; k < nd; ++k) {
        res.clamped_transitions += clamped[base + k];
        const auto t = static_cast<std::size_t>(next[base + k]);
        if (!seen[t]) {
          seen[t] = 1;
          stack.push_back(next[base + k]);
        }
      }
    }
  }
  return res;
}

}  // namespace dualsrc
